#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heislab/actions.hpp"
#include "heislab/ergodic.hpp"
#include "heislab/holonomy.hpp"
#include "heislab/smallmat.hpp"

/// Stability classification of the compact orbits of a horizontal action,
/// decided entirely by the derivative data at z = 0, plus the end-to-end
/// experiment driver that pairs each verdict with numerical witnesses
/// (holonomy displacement, drift estimates, equidistribution).
///
/// The decision table on A#(0) = [a_ij'(0)], i,j <= 2:
///   nilpotent                       -> L-unstable
///   A'(0) = diag(-l, 2l, l), l != 0 -> L-stable and T-unstable
///   det != 0                        -> L-stable
///   no real eigenvalues             -> additionally T-stable
/// Anything else stays undetermined.  The hypotheses of the first and third
/// rows are disjoint (nilpotent forces det = 0), so the fired criteria can
/// never contradict each other.

namespace heislab {

enum class LStatus { l_stable, l_unstable, undetermined };
enum class TStatus { t_stable, t_unstable, undetermined };

/// Which rows of the decision table fired.
enum class Criterion {
  nilpotent_derivative,   // A#(0) nilpotent
  exponential_diagonal,   // A'(0) = diag(-l, 2l, l) exactly
  nonzero_determinant,    // det A#(0) != 0
  no_real_eigenvalues,    // discriminant of A#(0) < 0
};

std::string to_string(LStatus s);
std::string to_string(TStatus s);
std::string to_string(Criterion c);

enum class WedgeSign { positive, negative, mixed };

std::string to_string(WedgeSign w);

/// Sign of (A u) ^ u = (Au)_1 u_2 - (Au)_2 u_1 over n_dirs unit directions;
/// mixed when both signs occur or any sampled value is below 1e-12 in
/// magnitude.  A constant sign is equivalent to A having no real
/// eigenvalues.  Requires n_dirs >= 8.
WedgeSign wedge_sign(const Mat2& a_sharp, int n_dirs = 360);

struct EigenData {
  std::array<std::complex<double>, 2> eigenvalues;
  double trace = 0.0;
  double det = 0.0;
  double discriminant = 0.0;
  bool nilpotent = false;
  WedgeSign wedge = WedgeSign::mixed;
};

struct StabilityVerdict {
  LStatus l_status = LStatus::undetermined;
  TStatus t_status = TStatus::undetermined;
  std::vector<Criterion> evidence;
  EigenData eigen;

  bool fired(Criterion c) const;
};

/// Classify the compact orbits of the horizontal action of `fam` by the
/// decision table above.  Requires A(0) = I within 1e-9 (throws
/// std::invalid_argument otherwise).
StabilityVerdict classify(const AutoFamily& fam);

/// What to do to the base family before measuring.
enum class PerturbationKind { none, nilpotent_bump, exponential_mixed };

struct ExperimentSpec {
  std::string name = "experiment";
  AutoFamily family;
  PerturbationKind perturbation = PerturbationKind::none;
  /// nilpotent_bump parameters.
  Bump bump{0.05, 0.2};
  /// exponential_mixed parameters (family should be mixed_family(lambda)).
  double lambda = 0.0;
  double c = 0.0;
  double eps = 1.0;

  double dt = 1e-3;
  double tau_horizon = 200.0;
  int grid_points = 401;
  double delta_near = 0.1;
  int translation_iterations = 200;
  bool run_discrepancy = false;
  long discrepancy_samples = 100000;
  int discrepancy_boxes = 8;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct ExperimentReport {
  std::string name;
  StabilityVerdict verdict;
  RelationsReport relations;
  std::optional<HolonomyMaps> maps;
  PseudogroupReport pseudogroup;
  bool compact_at_zero = false;
  bool abelian_at_zero = false;
  TranslationResult translation;
  /// Horizontal generator used for the second drift estimate: (-a, 1, 0)
  /// when the translation number a is defined, E1 otherwise.
  AlgebraVec horizontal_generator{1.0, 0.0, 0.0};
  std::optional<DriftReport> tau_e3;
  std::optional<DriftReport> tau_horizontal;
  std::optional<Vec2> xi_e3;
  std::optional<double> discrepancy;
  /// "stage: message" for every sub-computation that threw.
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Generating fields of the (possibly perturbed) action the spec describes.
ActionFields fields_from_spec(const ExperimentSpec& spec);

/// Run the full battery: classify, verify brackets, build holonomy, read
/// off leaf flags and the translation number, estimate the drifts, and
/// optionally run the equidistribution test.  Component errors land in
/// `failures` instead of propagating; dependent stages are skipped.
ExperimentReport run_experiment(const ExperimentSpec& spec);

}  // namespace heislab
