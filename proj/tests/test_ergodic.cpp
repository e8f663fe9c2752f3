#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "heislab/ergodic.hpp"

using namespace heislab;

namespace {

constexpr double kGoldenFrac = 0.6180339887498949;  // (sqrt 5 - 1)/2

double wrap_dist(double a, double b) {
  const double d = std::abs(frac(a) - frac(b));
  return std::min(d, 1.0 - d);
}

double cross2(const Vec2& a, const Vec2& b) {
  return a[0] * b[1] - a[1] * b[0];
}

double norm2(const Vec2& a) { return std::hypot(a[0], a[1]); }

}  // namespace

TEST_CASE("frac lands in [0,1)") {
  CHECK(frac(1.0) == 0.0);
  CHECK(frac(-0.25) == 0.75);
  CHECK(frac(0.5) == 0.5);
  CHECK(frac(3.75) == 0.75);
  const double tiny = frac(-1e-18);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1.0);
}

TEST_CASE("skew map iterate law") {
  CHECK(skew_map(0.0, {0.0, 0.0}).u == 0.0);
  CHECK(skew_map(0.0, {0.0, 0.0}).w == 0.0);

  const double c = 0.3777;
  const TorusPoint p0{0.123, 0.456};
  TorusPoint p = p0;
  for (int j = 1; j <= 57; ++j) {
    p = skew_map(c, p);
    const double uj = p0.u + j * c;
    const double wj = p0.w + j * p0.u + 0.5 * j * (j - 1) * c;
    CHECK(wrap_dist(p.u, uj) <= 1e-9);
    CHECK(wrap_dist(p.w, wj) <= 1e-9);
  }
}

TEST_CASE("skew map preserves the torus measure") {
  HaarSampler rng(91);
  TorusPoint p{rng.uniform(), rng.uniform()};
  std::vector<Vec2> pts;
  pts.reserve(100000);
  for (int k = 0; k < 100000; ++k) {
    pts.push_back({p.u, p.w});
    p = skew_map(kGoldenFrac, p);
  }
  CHECK(box_discrepancy(pts, 8) < 0.03);
}

TEST_CASE("constant monomial averages to one exactly") {
  const auto g = birkhoff_avg({0, 0}, kGoldenFrac, {0.3, 0.7}, 1000);
  CHECK(g.real() == 1.0);
  CHECK(g.imag() == 0.0);
}

TEST_CASE("pure first-coordinate monomials match the geometric sum") {
  HaarSampler rng(92);
  for (const int n : {1, -1, 2, -2, 3, -3}) {
    for (const long N : {1L, 7L, 100L, 10000L}) {
      const TorusPoint p0{rng.uniform(), rng.uniform()};
      const auto direct = birkhoff_avg({n, 0}, kGoldenFrac, p0, N);
      const auto closed = birkhoff_closed_form({n, 0}, kGoldenFrac, p0, N);
      CHECK(std::abs(direct - closed) <= 1e-10);
    }
  }

  // Rational slope degenerates to the bare monomial.
  const TorusPoint p0{0.37, 0.81};
  const auto direct = birkhoff_avg({2, 0}, 0.5, p0, 1000);
  const auto closed = birkhoff_closed_form({2, 0}, 0.5, p0, 1000);
  CHECK(std::abs(direct - closed) <= 1e-12);
  const auto z2 = monomial_eval({2, 0}, p0);
  CHECK(std::abs(closed - z2) <= 1e-12);

  CHECK_THROWS_AS(birkhoff_closed_form({0, 1}, 0.3, p0, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(birkhoff_closed_form({0, 0}, 0.3, p0, 10),
                  std::invalid_argument);
}

TEST_CASE("mixed monomial averages decay") {
  HaarSampler rng(93);
  std::vector<TorusPoint> starts;
  for (int s = 0; s < 20; ++s) starts.push_back({rng.uniform(), rng.uniform()});

  for (const Monomial f : {Monomial{0, 1}, Monomial{1, 1}, Monomial{-2, 3}}) {
    double prev = -1.0;
    for (const long N : {1000L, 10000L, 100000L}) {
      double worst = 0.0;
      for (const auto& p0 : starts) {
        worst = std::max(worst, std::abs(birkhoff_avg(f, kGoldenFrac, p0, N)));
      }
      if (prev >= 0.0) CHECK(worst <= 1.5 * prev);
      prev = worst;
      if (N == 100000L) CHECK(worst < 0.05);
    }
  }
}

TEST_CASE("return map formula and flow consistency") {
  const Vec2 img = return_map(0.0, 0.0, 0.5, {0.3, 0.8});
  CHECK(std::abs(img[0] - 0.3) <= 1e-15);
  CHECK(std::abs(img[1] - 0.5) <= 1e-15);

  std::mt19937_64 rng(94);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double y1s = u(rng), v2 = v(rng), v3 = v(rng);
    const Vec2 p{u(rng), u(rng)};
    const NilPoint q =
        flow_const({1.0, v2, v3}, NilPoint{y1s, p[0], p[1]}, 1.0);
    CHECK(wrap_dist(q.y1, y1s) <= 1e-12);
    const Vec2 r = return_map(v2, v3, y1s, p);
    CHECK(wrap_dist(r[0], q.y2) <= 1e-9);
    CHECK(wrap_dist(r[1], q.y3) <= 1e-9);
  }
}

TEST_CASE("unit time orbit equals the closed-form flow at integer times") {
  const AlgebraVec v{1.0, std::sqrt(2.0), 0.25};
  const NilPoint p0{0.2, 0.5, 0.8};
  const auto orbit = unit_time_orbit(v, p0, 100);
  REQUIRE(orbit.size() == 100);
  CHECK(quotient_dist(orbit[0], p0) == 0.0);
  // The closed form's central coordinate reaches ~7e3 before wrapping at
  // t = 99, so its own rounding is on the 1e-12 scale.
  for (const long k : {1L, 2L, 17L, 50L, 99L}) {
    CHECK(quotient_dist(orbit[k], flow_const(v, p0, k)) <= 1e-11);
  }
}

TEST_CASE("box discrepancy extremes") {
  const std::vector<NilPoint> repeated(100, NilPoint{0.3, 0.3, 0.3});
  CHECK(std::abs(box_discrepancy(repeated, 8) - 511.0 / 512.0) <= 1e-12);

  std::vector<NilPoint> uniform3;
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      for (int c = 0; c < 8; ++c) {
        uniform3.push_back({(a + 0.5) / 8.0, (b + 0.5) / 8.0,
                            (c + 0.5) / 8.0});
      }
    }
  }
  CHECK(box_discrepancy(uniform3, 8) <= 1e-12);

  const std::vector<Vec2> one(10, Vec2{0.9, 0.1});
  CHECK(std::abs(box_discrepancy(one, 8) - 63.0 / 64.0) <= 1e-12);
  std::vector<Vec2> uniform2;
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      uniform2.push_back({(a + 0.5) / 8.0, (b + 0.5) / 8.0});
    }
  }
  CHECK(box_discrepancy(uniform2, 8) <= 1e-12);
}

TEST_CASE("tau_tilde inverts the frame matrix") {
  const ActionFields id = fields_from_family(identity_family());
  std::mt19937_64 rng(95);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const AlgebraVec v{u(rng), u(rng), u(rng)};
    const MPoint p{{0.1, 0.7, 0.4}, 0.2};
    const AlgebraVec w = tau_tilde(id, p, v);
    CHECK(std::abs(w.v1 - v.v1) <= 1e-14);
    CHECK(std::abs(w.v2 - v.v2) <= 1e-14);
    CHECK(std::abs(w.v3 - v.v3) <= 1e-14);
  }

  // Exponential family rescales the first direction.
  const double lam = 0.3;
  const ActionFields mx = fields_from_family(mixed_family(lam));
  for (const double z : {-0.3, 0.0, 0.4}) {
    const AlgebraVec w = tau_tilde(mx, MPoint{{0, 0, 0}, z}, basis_e1());
    CHECK(std::abs(w.v1 - std::exp(lam * z)) <= 1e-12);
    CHECK(std::abs(w.v2) <= 1e-12);
    CHECK(std::abs(w.v3) <= 1e-12);
  }

  // General horizontal family: oracle is a direct linear solve on A(z).
  const AutoFamily fam = polynomial_family(
      {1.0, 0.1}, {0.0, 0.2, 0.05}, {0.0, -0.1}, {1.0, 0.3, -0.02},
      {0.0, 0.15}, {0.0, -0.25});
  const ActionFields hf = fields_from_family(fam);
  for (const double z : {-0.25, 0.15}) {
    const AlgebraVec v{0.7, -1.1, 0.4};
    const AlgebraVec w = tau_tilde(hf, MPoint{{0.6, 0.2, 0.9}, z}, v);
    const auto oracle = solve3(fam.at(z).m, {v.v1, v.v2, v.v3});
    CHECK(std::abs(w.v1 - oracle[0]) <= 1e-10);
    CHECK(std::abs(w.v2 - oracle[1]) <= 1e-10);
    CHECK(std::abs(w.v3 - oracle[2]) <= 1e-10);
  }

  ActionFields degenerate = id;
  degenerate.X[2] = degenerate.X[0];
  CHECK_THROWS_AS(
      tau_tilde(degenerate, MPoint{{0, 0, 0}, 0.0}, basis_e3()),
      std::domain_error);
}

TEST_CASE("drift of the identity action") {
  const ActionFields id = fields_from_family(identity_family());
  const MPoint p0{{0.3, 0.6, 0.1}, 0.0};

  const DriftReport e1 = tau_ab(id, p0, basis_e1(), 2.0, 1e-3);
  REQUIRE(e1.completed());
  CHECK(e1.converged);
  CHECK(e1.trend.size() == 3);
  CHECK(std::abs(e1.value[0] - 1.0) <= 1e-9);
  CHECK(std::abs(e1.value[1]) <= 1e-9);

  const DriftReport e3 = tau_ab(id, p0, basis_e3(), 2.0, 1e-3);
  REQUIRE(e3.completed());
  CHECK(std::abs(e3.value[0]) <= 1e-12);
  CHECK(std::abs(e3.value[1]) <= 1e-12);
}

TEST_CASE("drift of the exponential perturbation is the advertised constant") {
  const ActionFields mx = perturb_mixed(0.3, 0.05);
  const MPoint p0{{0.2, 0.8, 0.5}, 0.1};

  const DriftReport e3 = tau_ab(mx, p0, basis_e3(), 30.0, 1e-3);
  REQUIRE(e3.completed());
  CHECK(e3.converged);
  CHECK(std::abs(e3.value[0] - 0.05) <= 1e-6);
  CHECK(std::abs(e3.value[1]) <= 1e-9);

  // Homogeneity in the argument vector.
  const DriftReport twice = tau_ab(mx, p0, scale(2.0, basis_e3()), 20.0, 1e-3);
  const DriftReport minus = tau_ab(mx, p0, scale(-1.0, basis_e3()), 20.0, 1e-3);
  const DriftReport once = tau_ab(mx, p0, basis_e3(), 20.0, 1e-3);
  REQUIRE(twice.completed());
  REQUIRE(minus.completed());
  CHECK(std::abs(twice.value[0] - 2.0 * once.value[0]) <= 1e-6);
  CHECK(std::abs(minus.value[0] + once.value[0]) <= 1e-6);
}

TEST_CASE("drift along a transverse-drifting direction exits the strip") {
  const ActionFields mx = perturb_mixed(0.3, 0.05);
  const DriftReport r =
      tau_ab(mx, MPoint{{0, 0, 0}, 0.0}, basis_e2(), 20.0, 1e-3);
  CHECK_FALSE(r.completed());
  REQUIRE(r.exit.has_value());
  // e^{lambda z} = 1 - c t reaches e^{-lambda} at the exit.
  const double t_exact = (1.0 - std::exp(-0.3)) / 0.05;
  CHECK(std::abs(r.exit->time - t_exact) <= 0.05);
  CHECK(r.trend.size() >= 1);
}

TEST_CASE("tau_ab validates its inputs") {
  const ActionFields id = fields_from_family(identity_family());
  const MPoint p0{{0, 0, 0}, 0.0};
  CHECK_THROWS_AS(tau_ab(id, p0, basis_e1(), 0.0, 1e-3),
                  std::invalid_argument);
  CHECK_THROWS_AS(tau_ab(id, p0, basis_e1(), 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(tau_ab(id, MPoint{{0, 0, 0}, 1.2}, basis_e1(), 1.0, 1e-3),
                  std::invalid_argument);
  // Slope gate: E1 is not in the kernel of v1 + a v2 for a = 0.4.
  CHECK_THROWS_AS(tau_ab(id, p0, basis_e1(), 1.0, 1e-3, 0.4),
                  std::invalid_argument);
  const DriftReport ok =
      tau_ab(id, p0, AlgebraVec{-0.4, 1.0, 0.0}, 1.0, 1e-3, 0.4);
  CHECK(ok.completed());
}

TEST_CASE("abelianized loop development of the third generator") {
  const ActionFields id = fields_from_family(identity_family());
  const Vec2 flat = xi_ab_e3(id, MPoint{{0.4, 0.2, 0.9}, 0.1});
  CHECK(std::abs(flat[0]) <= 1e-12);
  CHECK(std::abs(flat[1]) <= 1e-12);

  const ActionFields mx = perturb_mixed(0.3, 0.05);
  for (const double z : {0.1, -0.2}) {
    const Vec2 xi = xi_ab_e3(mx, MPoint{{0, 0, 0}, z});
    CHECK(std::abs(xi[0] - 0.05) <= 1e-6);
    CHECK(std::abs(xi[1]) <= 1e-9);
  }
}

TEST_CASE("drift data is constant and one-dimensional on a leaf") {
  const double lam = 0.3, c = 0.05;
  const ActionFields mx = perturb_mixed(lam, c);
  const MPoint p0{{0, 0, 0}, 0.1};

  // A second point on the same leaf: flow along the second generator.
  const IntegrateResult path =
      integrate(combine_fields(mx, {0.0, 1.0, 0.0}), p0, 0.7, 1e-3, 1.0);
  REQUIRE(path.completed());
  const MPoint p1 = path.traj.samples.back().p;
  CHECK(p1.z < p0.z);

  // The loop development is constant along the (abelian) leaf.
  const Vec2 xi0 = xi_ab_e3(mx, p0);
  const Vec2 xi1 = xi_ab_e3(mx, p1);
  CHECK(std::abs(xi0[0] - xi1[0]) <= 1e-4);
  CHECK(std::abs(xi0[1] - xi1[1]) <= 1e-4);

  // Drift differences between leaf points align with the central drift.
  const DriftReport e3 = tau_ab(mx, p0, basis_e3(), 20.0, 1e-3);
  const DriftReport a0 = tau_ab(mx, p0, basis_e1(), 20.0, 1e-3);
  const DriftReport a1 = tau_ab(mx, p1, basis_e1(), 20.0, 1e-3);
  REQUIRE(e3.completed());
  REQUIRE(a0.completed());
  REQUIRE(a1.completed());
  const Vec2 diff{a1.value[0] - a0.value[0], a1.value[1] - a0.value[1]};
  CHECK(norm2(diff) > 1e-3);  // the drift really varies along the leaf
  const double cross =
      std::abs(cross2(diff, e3.value)) / (norm2(diff) * norm2(e3.value));
  CHECK(cross <= 1e-2);

  // Both measured drift directions span a single line.
  const double cross_dirs = std::abs(cross2(a0.value, e3.value)) /
                            (norm2(a0.value) * norm2(e3.value));
  CHECK(cross_dirs <= 1e-2);
}
