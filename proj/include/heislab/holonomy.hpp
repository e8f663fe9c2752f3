#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heislab/actions.hpp"
#include "heislab/flow.hpp"

/// Holonomy of the leaf foliation.  The three generator loops at a base
/// point g0 are t -> g0 exp(t E_i); lifting loop i from height z and reading
/// off the final height defines the partial map f_i.  The maps generate a
/// pseudogroup of interval maps satisfying
///
///   f2^{-1} o f1^{-1} o f2 o f1 = f3,   [f3, f1] = [f3, f2] = id,
///
/// and the leaf through (g0 H, z) is compact exactly when all three maps fix
/// z.  Maps are sampled on a uniform height grid and evaluated by monotone
/// cubic (Fritsch-Carlson) interpolation.

namespace heislab {

/// Cubic Hermite interpolant with monotonicity-preserving slopes.
class MonotoneInterpolant {
 public:
  MonotoneInterpolant() = default;
  MonotoneInterpolant(std::vector<double> x, std::vector<double> y);

  bool in_domain(double t) const;
  double operator()(double t) const;  // requires in_domain(t)
  std::optional<double> try_eval(double t) const;

  double domain_lo() const { return x_.front(); }
  double domain_hi() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;
};

struct GridSpec {
  int n_points = 401;
  /// Reject pseudogroups farther than this from the identity (sup norm);
  /// scenario configs may widen it for strongly perturbed actions.
  double delta_near = 0.1;
  double dt = 1e-3;
};

/// Sampled generator maps f_1, f_2, f_3 and their inverses on a uniform
/// grid spanning (-eps/2, eps/2).
struct HolonomyMaps {
  std::vector<double> grid;
  std::array<std::vector<double>, 3> f_vals;
  std::array<std::vector<double>, 3> finv_vals;
  std::array<MonotoneInterpolant, 3> f;
  std::array<MonotoneInterpolant, 3> finv;
  bool has_inverse_samples = false;
  GroupElem base;
  double eps = 1.0;

  std::optional<double> eval_f(int i, double z) const;
  /// Sampled inverse when available (s = -1 lifts), otherwise the
  /// functional inverse of the forward interpolant by bisection.
  std::optional<double> eval_finv(int i, double z) const;

  double max_displacement(int i) const;
};

/// Construct the maps by lifting all six generator loops (s = +-1) from
/// every grid height.  Lifts at distinct heights are independent and are
/// distributed over `jobs` threads.  Throws if the action fields fail the
/// bracket relations, if any lift exits the strip, if a sampled map is not
/// strictly increasing, or if the pseudogroup is not delta_near-close to
/// the identity.
HolonomyMaps holonomy_maps(const ActionFields& fields, const GroupElem& g0,
                           const GridSpec& spec, int jobs = 1);

struct PseudogroupReport {
  double max_dev_comm = 0.0;  // [f2,f1] vs f3
  double max_dev_31 = 0.0;    // [f3,f1] vs id
  double max_dev_32 = 0.0;    // [f3,f2] vs id
  int n_checked = 0;
  int n_skipped = 0;  // compositions that left the grid domain

  double max_dev() const;
  bool pass(double tol) const;
};

PseudogroupReport check_pseudogroup_relations(const HolonomyMaps& maps);

/// True iff all three maps fix z0 within tol_fix.
bool is_compact_leaf(const HolonomyMaps& maps, double z0,
                     double tol_fix = 1e-7);

/// True iff f3 fixes z0 within tol_fix (commutator holonomy is trivial).
bool is_abelian_leaf(const HolonomyMaps& maps, double z0,
                     double tol_fix = 1e-7);

/// Partial map on an interval: nullopt when the argument leaves the domain.
using IntervalMap = std::function<std::optional<double>(double)>;

struct TranslationResult {
  enum class Status {
    ok,
    fixed_point,   // f1 fixes z0 (or the orbit stalls), no coordinates exist
    left_domain,   // an orbit left the map domain before n iterations
  };
  Status status = Status::fixed_point;
  double value = 0.0;
  int iterations = 0;

  bool defined() const { return status == Status::ok; }
};

/// Translation number of f2 relative to f1 at z0: the f1-orbit of z0 gives
/// integer coordinates (fractional part by linear interpolation between
/// consecutive orbit points), and a is the limit of coord(f2^m(z0))/m.
/// For f1 = z + b, f2 = z + a*b this recovers a exactly.
TranslationResult translation_number(const IntervalMap& f1,
                                     const IntervalMap& f1_inv,
                                     const IntervalMap& f2, double z0, int n);

TranslationResult translation_number(const HolonomyMaps& maps, double z0,
                                     int n);

/// Horizontal subalgebra {(-a y, y, z)}: the kernel of the induced
/// functional alpha'(v) = v1 + a v2.
struct HorizontalSubalgebra {
  double a = 0.0;

  double alpha_prime(const AlgebraVec& v) const { return v.v1 + a * v.v2; }
  bool contains(const AlgebraVec& v, double tol = 1e-9) const {
    return std::abs(alpha_prime(v)) <= tol;
  }
  AlgebraVec generator() const { return {-a, 1.0, 0.0}; }
};

/// Rows "z,f1,f2,f3".
std::string holonomy_csv(const HolonomyMaps& maps);

/// Rebuild maps from CSV (inverses fall back to bisection on the forward
/// interpolants).
HolonomyMaps holonomy_from_csv(const std::string& csv, double eps);

}  // namespace heislab
