#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "heislab/actions.hpp"
#include "heislab/heis.hpp"
#include "heislab/nilmanifold.hpp"

/// Integration on G/H and on the strip, and leaf lifting.  Everything uses
/// fixed-step classical RK4; stage points are taken in the chart continued
/// from the current cube representative and the result is canonicalized
/// after each full step, so face crossings never break a stencil.  Leaving
/// the strip is an ordinary outcome (it is the noncompactness evidence the
/// experiments look for), so it is reported as a value, not thrown.

namespace heislab {

struct TrajectorySample {
  double t = 0.0;
  MPoint p;
};

/// Sampled curve in M.  When produced by lift_path, leaf_coeffs[k] holds the
/// coefficients c with tangent = c1 X1 + c2 X2 + c3 X3 at sample k.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<std::array<double, 3>> leaf_coeffs;

  bool has_leaf_coeffs() const {
    return !samples.empty() && leaf_coeffs.size() == samples.size();
  }
};

/// First time at which |z| reached the strip boundary (linearly
/// interpolated within the offending step).
struct StripExit {
  double time = 0.0;
  double z = 0.0;
};

struct IntegrateResult {
  Trajectory traj;
  std::optional<StripExit> exit;

  bool completed() const { return !exit.has_value(); }
};

/// Flow of a single field on M from p0 over [0, T], sampling every step.
IntegrateResult integrate(const FieldFn& field, const MPoint& p0, double T,
                          double dt, double eps);

/// Exact flow of the constant horizontal field v: time-t image is
/// exp(t v) . p by left translation.
NilPoint flow_const(const AlgebraVec& v, const NilPoint& p, double t);

/// Smooth path in G with its coordinate derivative (dy1, dy2, dy3)/dt.
struct GPath {
  std::function<GroupElem(double)> pos;
  std::function<std::array<double, 3>(double)> coord_vel;
};

/// Generator path t -> g0 * exp(s t E_i), i in {1,2,3}; its projection is a
/// closed loop in G/H since exp(s E_i) has integer entries for s = +-1.
GPath generator_path(const GroupElem& g0, int i, double s);

/// Frame decomposition at p: leaf coefficients c with
/// sum_j c_j (Y-part of X_j(p)) = w, plus the induced vertical speed
/// zdot = sum_j c_j (Z-part of X_j(p)).  Throws on a singular frame.
struct LeafSolve {
  std::array<double, 3> c{};
  double zdot = 0.0;
};

LeafSolve solve_leaf_coefficients(const ActionFields& fields, const MPoint& p,
                                  const std::array<double, 3>& w);

struct LiftResult {
  Trajectory traj;
  /// Running product xi of exp(dt * c(t)) (development into G), integrated
  /// alongside the lift at full RK4 accuracy.
  GroupElem development;
  std::optional<StripExit> exit;
  double final_z = 0.0;

  bool completed() const { return !exit.has_value(); }
};

/// Lift of a G-path to the leaf through (path(0) H, z0): the G/H component
/// is prescribed, the height obeys the tangency condition.  Requires
/// |z0| < eps/2 (the goodness window); the lift itself may wander anywhere
/// inside the strip and fails with a StripExit when it reaches the boundary.
LiftResult lift_path(const ActionFields& fields, const GPath& path, double z0,
                     double dt = 1e-3);

/// Development of a leaf path into G from its stored leaf coefficients:
/// the running product xi <- exp(dt * c(t)) * xi.  Requires leaf_coeffs.
GroupElem group_development(const Trajectory& leafpath);

/// Rows "t,y1,y2,y3,z".
std::string trajectory_csv(const Trajectory& traj);

}  // namespace heislab
