#include "heislab/stability.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heislab {

std::string to_string(LStatus s) {
  switch (s) {
    case LStatus::l_stable:
      return "L-stable";
    case LStatus::l_unstable:
      return "L-unstable";
    default:
      return "undetermined";
  }
}

std::string to_string(TStatus s) {
  switch (s) {
    case TStatus::t_stable:
      return "T-stable";
    case TStatus::t_unstable:
      return "T-unstable";
    default:
      return "undetermined";
  }
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::nilpotent_derivative:
      return "nilpotent-derivative";
    case Criterion::exponential_diagonal:
      return "exponential-diagonal";
    case Criterion::nonzero_determinant:
      return "nonzero-determinant";
    default:
      return "no-real-eigenvalues";
  }
}

std::string to_string(WedgeSign w) {
  switch (w) {
    case WedgeSign::positive:
      return "positive";
    case WedgeSign::negative:
      return "negative";
    default:
      return "mixed";
  }
}

WedgeSign wedge_sign(const Mat2& a_sharp, int n_dirs) {
  if (n_dirs < 8) {
    throw std::invalid_argument("wedge_sign: need at least 8 directions");
  }
  bool pos = false, neg = false;
  for (int k = 0; k < n_dirs; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n_dirs;
    const std::array<double, 2> u{std::cos(t), std::sin(t)};
    const auto au = a_sharp.apply(u);
    const double wedge = au[0] * u[1] - au[1] * u[0];
    if (std::abs(wedge) < 1e-12) return WedgeSign::mixed;
    (wedge > 0.0 ? pos : neg) = true;
    if (pos && neg) return WedgeSign::mixed;
  }
  return pos ? WedgeSign::positive : WedgeSign::negative;
}

bool StabilityVerdict::fired(Criterion c) const {
  for (const Criterion e : evidence) {
    if (e == c) return true;
  }
  return false;
}

StabilityVerdict classify(const AutoFamily& fam) {
  const HomMatrix a0 = fam.at(0.0);
  double id_residual = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      id_residual = std::max(
          id_residual, std::abs(a0(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  if (id_residual > 1e-9) {
    throw std::invalid_argument("classify: family has A(0) != I");
  }

  const HomMatrix d = fam.deriv(0.0);
  const Mat2 sharp = d.upper2();

  StabilityVerdict v;
  v.eigen.eigenvalues = eigenvalues(sharp);
  v.eigen.trace = sharp.trace();
  v.eigen.det = sharp.det();
  v.eigen.discriminant = v.eigen.trace * v.eigen.trace - 4.0 * v.eigen.det;
  v.eigen.nilpotent = sharp.square().max_abs() < 1e-9 &&
                      std::abs(v.eigen.trace) < 1e-9 &&
                      std::abs(v.eigen.det) < 1e-9;
  v.eigen.wedge = wedge_sign(sharp, 360);

  if (v.eigen.nilpotent) {
    v.l_status = LStatus::l_unstable;
    v.evidence.push_back(Criterion::nilpotent_derivative);
    return v;
  }

  // Exact exponential-diagonal form diag(-l, 2l, l), l != 0.
  const double lambda = -d(0, 0);
  bool diag_form = std::abs(lambda) > 1e-9 &&
                   std::abs(d(1, 1) - 2.0 * lambda) < 1e-9 &&
                   std::abs(d(2, 2) - lambda) < 1e-9;
  if (diag_form) {
    for (int i = 0; i < 3 && diag_form; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i != j && std::abs(d(i, j)) > 1e-9) {
          diag_form = false;
          break;
        }
      }
    }
  }
  if (diag_form) {
    v.l_status = LStatus::l_stable;
    v.t_status = TStatus::t_unstable;
    v.evidence.push_back(Criterion::exponential_diagonal);
  }

  if (std::abs(v.eigen.det) > 1e-9) {
    v.l_status = LStatus::l_stable;
    v.evidence.push_back(Criterion::nonzero_determinant);
  }

  if (v.eigen.discriminant < -1e-9) {
    v.t_status = TStatus::t_stable;
    v.evidence.push_back(Criterion::no_real_eigenvalues);
  }

  return v;
}

ActionFields fields_from_spec(const ExperimentSpec& spec) {
  switch (spec.perturbation) {
    case PerturbationKind::nilpotent_bump:
      return perturb_nilpotent(spec.family,
                               make_nilpotent_spec(spec.family, spec.bump));
    case PerturbationKind::exponential_mixed:
      return perturb_mixed(spec.lambda, spec.c, spec.eps);
    default:
      return fields_from_family(spec.family);
  }
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  ExperimentReport rep;
  rep.name = spec.name;

  auto attempt = [&rep](const char* stage, auto&& fn) -> bool {
    try {
      fn();
      return true;
    } catch (const std::exception& e) {
      rep.failures.push_back(std::string(stage) + ": " + e.what());
      return false;
    }
  };

  ActionFields fields;
  bool have_fields =
      attempt("fields", [&] { fields = fields_from_spec(spec); });

  attempt("classify", [&] { rep.verdict = classify(spec.family); });

  if (!have_fields) return rep;

  attempt("relations", [&] {
    rep.relations = verify_heisenberg_relations(fields, 50, 1e-4, spec.seed);
  });

  const bool have_maps = attempt("holonomy", [&] {
    GridSpec grid;
    grid.n_points = spec.grid_points;
    grid.delta_near = spec.delta_near;
    grid.dt = spec.dt;
    rep.maps = holonomy_maps(fields, identity_elem(), grid, spec.jobs);
  });

  if (have_maps) {
    attempt("pseudogroup", [&] {
      rep.pseudogroup = check_pseudogroup_relations(*rep.maps);
    });
    attempt("leaf-flags", [&] {
      rep.compact_at_zero = is_compact_leaf(*rep.maps, 0.0);
      rep.abelian_at_zero = is_abelian_leaf(*rep.maps, 0.0);
    });
    attempt("translation", [&] {
      rep.translation =
          translation_number(*rep.maps, 0.0, spec.translation_iterations);
    });
  }

  std::optional<double> slope;
  if (rep.translation.defined()) {
    slope = rep.translation.value;
    rep.horizontal_generator =
        HorizontalSubalgebra{rep.translation.value}.generator();
  } else {
    rep.horizontal_generator = basis_e1();
  }

  const MPoint p0{NilPoint{}, 0.0};
  attempt("tau-e3", [&] {
    rep.tau_e3 =
        tau_ab(fields, p0, basis_e3(), spec.tau_horizon, spec.dt, slope);
  });
  attempt("tau-horizontal", [&] {
    rep.tau_horizontal = tau_ab(fields, p0, rep.horizontal_generator,
                                spec.tau_horizon, spec.dt, slope);
  });
  attempt("xi-e3", [&] { rep.xi_e3 = xi_ab_e3(fields, p0, spec.dt); });

  if (spec.run_discrepancy) {
    attempt("discrepancy", [&] {
      HaarSampler sampler(spec.seed);
      const auto orbit =
          unit_time_orbit(AlgebraVec{1.0, std::sqrt(2.0), 0.0},
                          sampler.sample(), spec.discrepancy_samples);
      rep.discrepancy = box_discrepancy(orbit, spec.discrepancy_boxes);
    });
  }

  return rep;
}

}  // namespace heislab
