#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "heislab/actions.hpp"
#include "heislab/flow.hpp"
#include "heislab/heis.hpp"
#include "heislab/nilmanifold.hpp"

/// Averaging machinery: the skew torus map and its Birkhoff averages, the
/// unit-time return map of a constant flow with its equidistribution test,
/// and the abelianized drift tau_Ab measured along lifted leaves.  The drift
/// is the invariant that separates compact from noncompact behaviour: it
/// vanishes on E3 for every horizontal action and is forced away from zero
/// by the exponential-mixed perturbation.

namespace heislab {

/// Angle coordinates on T^2, both in [0,1).  In the unit-circle picture
/// z = e^{2 pi i u}, w = e^{2 pi i w}.
struct TorusPoint {
  double u = 0.0;
  double w = 0.0;
};

/// Fractional part in [0,1).
double frac(double x);

/// The skew map (z, w) -> (alpha z, z w) with alpha = e^{2 pi i c}; in angle
/// coordinates (u, w) -> (u + c, w + u) mod 1.
TorusPoint skew_map(double c, const TorusPoint& p);

/// Test observable f(z, w) = z^n w^m.
struct Monomial {
  int n = 0;
  int m = 0;
};

std::complex<double> monomial_eval(const Monomial& f, const TorusPoint& p);

/// g_N = (1/N) sum_{j<N} f(phi^j p), by direct Kahan-compensated summation.
std::complex<double> birkhoff_avg(const Monomial& f, double c,
                                  const TorusPoint& p0, long N);

/// Geometric closed form of g_N for m = 0, n != 0:
/// (1/N) z^n (alpha^{Nn} - 1)/(alpha^n - 1), degenerating to z^n when
/// alpha^n = 1.  Throws std::invalid_argument unless m = 0 and n != 0.
std::complex<double> birkhoff_closed_form(const Monomial& f, double c,
                                          const TorusPoint& p0, long N);

/// Unit-time return map of the constant flow of (1, v2, v3) on the section
/// {y1 = y1_section}: (y2, y3) -> (y2 + v2, y3 - y2 + v3 + (y1_section -
/// 1/2) v2), both coordinates mod 1.
Vec2 return_map(double v2, double v3, double y1_section, const Vec2& p);

/// Points p, exp(v).p, exp(2v).p, ..., n samples total (exact group steps).
std::vector<NilPoint> unit_time_orbit(const AlgebraVec& v, const NilPoint& p0,
                                      long n);

/// Max over the k^3 cube partition of |empirical fraction - box volume|.
double box_discrepancy(const std::vector<NilPoint>& pts, int k);

/// Same over the k^2 partition of T^2.
double box_discrepancy(const std::vector<Vec2>& pts, int k);

/// Leaf coefficients of v: the unique w with sum_j w_j (Y-part of X_j(p))
/// equal to v.  Throws on a singular frame.
AlgebraVec tau_tilde(const ActionFields& fields, const MPoint& p,
                     const AlgebraVec& v);

/// Time-average estimate of the abelianized drift.
struct DriftReport {
  Vec2 value{0.0, 0.0};
  double horizon = 0.0;
  double dt = 0.0;
  /// Partial averages at T/4, T/2 and T.
  std::vector<Vec2> trend;
  /// Last two partial averages within 1e-3 of each other.
  bool converged = false;
  std::optional<StripExit> exit;

  bool completed() const { return !exit.has_value(); }
};

/// tau_Ab,p0(v) = lim (1/t) Ab(xi_{p0}(tv)), evaluated as the running
/// average of Ab(tau_tilde) along the leaf-lifted flow of v: the base point
/// advances by exact group steps exp(dt v), the height and the integral by
/// RK4.  When `slope` is given (the horizontal subalgebra parameter a), v
/// must satisfy v1 + a v2 = 0 within 1e-9.  Leaving the strip before T ends
/// the average early and is reported in `exit`.
DriftReport tau_ab(const ActionFields& fields, const MPoint& p0,
                   const AlgebraVec& v, double T, double dt,
                   std::optional<double> slope = std::nullopt);

/// Ab(xi_p(E3)): the development of the lifted gamma_3 loop, abelianized.
/// (0,0) exactly for horizontal actions; constant on abelian leaves.
Vec2 xi_ab_e3(const ActionFields& fields, const MPoint& p0, double dt = 1e-3);

}  // namespace heislab
