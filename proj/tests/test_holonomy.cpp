#include <doctest.h>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heislab/holonomy.hpp"

using namespace heislab;

namespace {

constexpr double kGolden = 1.6180339887498949;  // (1 + sqrt 5)/2

IntervalMap shift(double step) {
  return [step](double z) { return std::optional<double>(z + step); };
}

HolonomyMaps mixed_maps(int n_points, const GroupElem& base) {
  return holonomy_maps(perturb_mixed(0.3, 0.05), base,
                       GridSpec{n_points, 0.3, 1e-3});
}

}  // namespace

TEST_CASE("monotone interpolant reproduces nodes and stays monotone") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{0.0, 0.5, 0.6, 2.0, 2.05};
  const MonotoneInterpolant m(x, y);

  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(m(x[i]) == y[i]);
  }
  CHECK(m.in_domain(0.0));
  CHECK(m.in_domain(4.0));
  CHECK_FALSE(m.in_domain(-0.1));
  CHECK_FALSE(m.try_eval(4.3).has_value());
  CHECK_THROWS_AS(m(4.5), std::domain_error);

  double prev = m(0.0);
  for (int k = 1; k <= 400; ++k) {
    const double t = 4.0 * k / 400.0;
    const double v = m(t);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }

  CHECK_THROWS_AS(MonotoneInterpolant({1.0}, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneInterpolant({0.0, 0.0}, {1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("horizontal actions have identity holonomy") {
  const HolonomyMaps maps =
      holonomy_maps(fields_from_family(identity_family()), identity_elem(),
                    GridSpec{21, 0.1, 1e-3});
  for (int i = 0; i < 3; ++i) {
    CHECK(maps.max_displacement(i) <= 1e-9);
  }
  CHECK(is_compact_leaf(maps, 0.0));
  CHECK(is_abelian_leaf(maps, 0.0));
  CHECK(is_compact_leaf(maps, maps.grid.front()));

  const PseudogroupReport rep = check_pseudogroup_relations(maps);
  CHECK(rep.pass(1e-9));
  CHECK(rep.n_checked > 0);

  CHECK_THROWS_AS(is_compact_leaf(maps, 0.9), std::domain_error);
  CHECK_THROWS_AS(is_abelian_leaf(maps, 0.9), std::domain_error);
}

TEST_CASE("exponential action holonomy matches the closed form") {
  const double lam = 0.3, c = 0.05;
  const HolonomyMaps maps = mixed_maps(41, identity_elem());

  // Only the second generator moves heights; its lift integrates
  // d(e^{lambda z})/dt = -c, so f2(z) = ln(e^{lambda z} - c)/lambda.
  for (const double z : maps.grid) {
    CHECK(std::abs(*maps.eval_f(0, z) - z) <= 1e-9);
    CHECK(std::abs(*maps.eval_f(2, z) - z) <= 1e-9);
    const double f2 = *maps.eval_f(1, z);
    const double want = std::log(std::exp(lam * z) - c) / lam;
    CHECK(std::abs(f2 - want) <= 1e-6);
  }

  // Sampled values are strictly increasing in z.
  for (int i = 0; i < 3; ++i) {
    for (std::size_t k = 1; k < maps.grid.size(); ++k) {
      CHECK(maps.f_vals[i][k] > maps.f_vals[i][k - 1]);
    }
  }

  // Inverse samples really invert, and match their own closed form.
  CHECK(maps.has_inverse_samples);
  for (const double z : maps.grid) {
    const auto w = maps.eval_finv(1, z);
    REQUIRE(w.has_value());
    CHECK(std::abs(*w - std::log(std::exp(lam * z) + c) / lam) <= 1e-6);
    const auto back = maps.eval_f(1, *w);
    if (back.has_value()) {
      CHECK(std::abs(*back - z) <= 1e-7);
    }
  }

  CHECK_FALSE(is_compact_leaf(maps, 0.0));
  CHECK(is_abelian_leaf(maps, 0.0));
  CHECK(maps.max_displacement(1) > 0.15);

  const PseudogroupReport rep = check_pseudogroup_relations(maps);
  CHECK(rep.pass(1e-5));
  CHECK(rep.n_checked > 0);
}

TEST_CASE("holonomy is a function of the coset, not the representative") {
  const HolonomyMaps a = mixed_maps(21, identity_elem());
  // (1,1,1) reduces to the identity coset: same leaf, same maps.
  const HolonomyMaps b = mixed_maps(21, GroupElem{1.0, 1.0, 1.0});
  for (std::size_t k = 0; k < a.grid.size(); ++k) {
    CHECK(std::abs(a.f_vals[1][k] - b.f_vals[1][k]) <= 1e-7);
    CHECK(std::abs(a.f_vals[2][k] - b.f_vals[2][k]) <= 1e-7);
  }
}

TEST_CASE("bump perturbation: noncompact yet abelian at the center") {
  const Mat3 B{{{{0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}}};
  const AutoFamily fam = linear_family(B);
  const ActionFields f =
      perturb_nilpotent(fam, make_nilpotent_spec(fam, Bump{0.05, 0.2}));
  // The bump is curvy enough that the piecewise-linear composition error
  // of the relation check needs the full default grid to sit below 1e-5.
  const HolonomyMaps maps = holonomy_maps(f, identity_elem(), GridSpec{});

  CHECK_FALSE(is_compact_leaf(maps, 0.0));
  CHECK(is_abelian_leaf(maps, 0.0));
  CHECK(std::abs(*maps.eval_f(1, 0.0)) > 1e-4);
  CHECK(std::abs(*maps.eval_f(0, 0.0)) <= 1e-9);
  CHECK(std::abs(*maps.eval_f(2, 0.0)) <= 1e-9);

  // Outside the bump support the leaf is untouched.
  CHECK(std::abs(*maps.eval_f(1, 0.35) - 0.35) <= 1e-9);

  const PseudogroupReport rep = check_pseudogroup_relations(maps);
  CHECK(rep.pass(1e-5));
}

TEST_CASE("construction guards") {
  const ActionFields f = perturb_mixed(0.3, 0.05);
  CHECK_THROWS_AS(
      holonomy_maps(f, identity_elem(), GridSpec{4, 0.3, 1e-3}),
      std::invalid_argument);
  // The exponential maps move ~0.2 near the grid edge; a 0.1 gate trips.
  CHECK_THROWS_AS(
      holonomy_maps(f, identity_elem(), GridSpec{21, 0.1, 1e-3}),
      std::domain_error);

  ActionFields broken = fields_from_family(identity_family());
  broken.X[2] = constant_field(basis_e1());
  CHECK_THROWS_AS(
      holonomy_maps(broken, identity_elem(), GridSpec{21, 0.1, 1e-3}),
      std::invalid_argument);
}

TEST_CASE("corrupted commutator map breaks the relations") {
  HolonomyMaps maps = mixed_maps(21, identity_elem());
  for (double& v : maps.f_vals[2]) v += 0.01;
  const HolonomyMaps bad = holonomy_from_csv(holonomy_csv(maps), maps.eps);

  CHECK_FALSE(check_pseudogroup_relations(bad).pass(1e-5));
  CHECK_FALSE(is_abelian_leaf(bad, 0.0));
  CHECK_FALSE(is_compact_leaf(bad, 0.0));
}

TEST_CASE("holonomy csv round trip") {
  const HolonomyMaps maps = mixed_maps(21, identity_elem());
  const std::string csv = holonomy_csv(maps);
  CHECK(csv.rfind("z,f1,f2,f3\n", 0) == 0);

  const HolonomyMaps back = holonomy_from_csv(csv, maps.eps);
  REQUIRE(back.grid.size() == maps.grid.size());
  for (std::size_t k = 0; k < maps.grid.size(); ++k) {
    CHECK(std::abs(back.grid[k] - maps.grid[k]) <= 1e-15);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(back.f_vals[i][k] - maps.f_vals[i][k]) <= 1e-15);
    }
  }
  // Interpolated evaluation survives the round trip.
  const double z = 0.5 * (maps.grid[3] + maps.grid[4]);
  CHECK(std::abs(*back.eval_f(1, z) - *maps.eval_f(1, z)) <= 1e-9);
  // Inverses fall back to bisection on the forward maps.
  CHECK_FALSE(back.has_inverse_samples);
  const double w = *back.eval_finv(1, 0.0);
  CHECK(std::abs(*back.eval_f(1, w)) <= 1e-9);

  CHECK_THROWS_AS(holonomy_from_csv("", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(holonomy_from_csv("z,f1,f2,f3\nnot,a,number,row\n", 1.0),
                  std::invalid_argument);
}

TEST_CASE("translation number of synthetic shift pairs") {
  // Golden pair: the classical relative translation number.
  const TranslationResult gold = translation_number(
      shift(0.01), shift(-0.01), shift(0.01 * kGolden), 0.0, 10000);
  REQUIRE(gold.defined());
  CHECK(std::abs(gold.value - kGolden) <= 1e-3);
  CHECK(gold.iterations == 10000);

  // Identical maps translate by exactly one step.
  const TranslationResult one =
      translation_number(shift(0.01), shift(-0.01), shift(0.01), 0.0, 200);
  REQUIRE(one.defined());
  CHECK(std::abs(one.value - 1.0) <= 1e-9);

  // A fixed second map has translation number zero.
  const TranslationResult zero = translation_number(
      shift(0.01), shift(-0.01), shift(0.0), 0.0, 200);
  REQUIRE(zero.defined());
  CHECK(std::abs(zero.value) <= 1e-9);

  // Decreasing orbits work the same way.
  const TranslationResult down = translation_number(
      shift(-0.01), shift(0.01), shift(-0.01 * kGolden), 0.0, 5000);
  REQUIRE(down.defined());
  CHECK(std::abs(down.value - kGolden) <= 1e-3);

  // A fixed point of f1 leaves the coordinates undefined.
  const TranslationResult fixed = translation_number(
      shift(0.0), shift(0.0), shift(0.01), 0.0, 100);
  CHECK_FALSE(fixed.defined());
  CHECK(fixed.status == TranslationResult::Status::fixed_point);

  // Bounded domain: the orbit runs off the end before n iterations.
  const IntervalMap capped = [](double z) -> std::optional<double> {
    const double w = z + 0.01;
    if (w > 1.0) return std::nullopt;
    return w;
  };
  const IntervalMap capped_inv = [](double z) -> std::optional<double> {
    const double w = z - 0.01;
    if (w < 0.0) return std::nullopt;
    return w;
  };
  const TranslationResult part = translation_number(
      capped, capped_inv, shift(0.01 * kGolden), 0.7, 10000);
  CHECK(part.status == TranslationResult::Status::left_domain);
  CHECK(part.iterations < 10000);
  CHECK(part.iterations > 0);
}

TEST_CASE("translation number is base-point invariant") {
  const double phi = kGolden;
  for (const double z0 : {0.0, 0.01, 0.01 * phi, -0.3}) {
    const TranslationResult r = translation_number(
        shift(0.01), shift(-0.01), shift(0.01 * phi), z0, 4000);
    REQUIRE(r.defined());
    CHECK(std::abs(r.value - phi) <= 2e-3);
  }
}

TEST_CASE("translation number from sampled maps: fixed first map") {
  const HolonomyMaps maps = mixed_maps(21, identity_elem());
  const TranslationResult r = translation_number(maps, 0.0, 100);
  CHECK_FALSE(r.defined());
  CHECK(r.status == TranslationResult::Status::fixed_point);
}

TEST_CASE("horizontal subalgebra functional") {
  const HorizontalSubalgebra h{0.4};
  CHECK(h.alpha_prime({1.0, 0.0, 0.0}) == 1.0);
  CHECK(h.alpha_prime({-0.4, 1.0, 0.0}) == 0.0);
  CHECK(h.contains(h.generator()));
  CHECK_FALSE(h.contains(basis_e1()));
  CHECK(h.contains(basis_e3()));
}
