#include "heislab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "heislab/smallmat.hpp"

namespace heislab {

namespace {

// Coordinate velocity of a field at a chart point (y raw, z).
std::array<double, 4> coord_velocity(const FieldFn& field,
                                     const std::array<double, 4>& y) {
  const MPoint p{canonicalize(GroupElem{y[0], y[1], y[2]}), y[3]};
  const FrameCoeffs w = field(p);
  return {w.y1, w.y2, w.y3 + y[0] * w.y2, w.z};
}

std::array<double, 4> axpy4(const std::array<double, 4>& y, double a,
                            const std::array<double, 4>& d) {
  return {y[0] + a * d[0], y[1] + a * d[1], y[2] + a * d[2], y[3] + a * d[3]};
}

}  // namespace

IntegrateResult integrate(const FieldFn& field, const MPoint& p0, double T,
                          double dt, double eps) {
  if (dt <= 0.0 || T < 0.0) {
    throw std::invalid_argument("integrate: need dt > 0 and T >= 0");
  }
  if (std::abs(p0.z) >= eps) {
    throw std::invalid_argument("integrate: start point outside the strip");
  }
  IntegrateResult res;
  res.traj.samples.push_back({0.0, p0});
  std::array<double, 4> y{p0.base.y1, p0.base.y2, p0.base.y3, p0.z};
  double t = 0.0;
  const long nsteps = static_cast<long>(std::ceil(T / dt - 1e-12));
  for (long k = 0; k < nsteps; ++k) {
    const double h = std::min(dt, T - t);
    const auto k1 = coord_velocity(field, y);
    const auto k2 = coord_velocity(field, axpy4(y, h / 2.0, k1));
    const auto k3 = coord_velocity(field, axpy4(y, h / 2.0, k2));
    const auto k4 = coord_velocity(field, axpy4(y, h, k3));
    std::array<double, 4> ynew;
    for (int i = 0; i < 4; ++i) {
      ynew[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    const double tnew = t + h;
    if (std::abs(ynew[3]) >= eps) {
      // Interpolate the crossing time within the step.
      const double za = std::abs(y[3]), zb = std::abs(ynew[3]);
      const double frac = (zb > za) ? (eps - za) / (zb - za) : 1.0;
      res.exit = StripExit{t + frac * h, ynew[3]};
      return res;
    }
    const NilPoint base = canonicalize(GroupElem{ynew[0], ynew[1], ynew[2]});
    y = {base.y1, base.y2, base.y3, ynew[3]};
    t = tnew;
    res.traj.samples.push_back({t, MPoint{base, ynew[3]}});
  }
  return res;
}

NilPoint flow_const(const AlgebraVec& v, const NilPoint& p, double t) {
  return left_translate(alg_exp(scale(t, v)), p);
}

GPath generator_path(const GroupElem& g0, int i, double s) {
  if (i < 1 || i > 3) {
    throw std::invalid_argument("generator_path: i must be 1, 2 or 3");
  }
  GPath path;
  path.pos = [g0, i, s](double t) {
    AlgebraVec v{};
    if (i == 1) v.v1 = s * t;
    if (i == 2) v.v2 = s * t;
    if (i == 3) v.v3 = s * t;
    return mul(g0, alg_exp(v));
  };
  // d/dt (g0 * p(t)) = (p1', p2', p3' + g0.y2 * p1').
  path.coord_vel = [g0, i, s](double) -> std::array<double, 3> {
    if (i == 1) return {s, 0.0, g0.y2 * s};
    if (i == 2) return {0.0, s, 0.0};
    return {0.0, 0.0, s};
  };
  return path;
}

LeafSolve solve_leaf_coefficients(const ActionFields& fields, const MPoint& p,
                                  const std::array<double, 3>& w) {
  Mat3 m;
  std::array<double, 3> zparts{};
  for (int j = 0; j < 3; ++j) {
    const FrameCoeffs xj = fields.X[j](p);
    m(0, j) = xj.y1;
    m(1, j) = xj.y2;
    m(2, j) = xj.y3;
    zparts[j] = xj.z;
  }
  LeafSolve out;
  out.c = solve3(m, w);
  out.zdot = out.c[0] * zparts[0] + out.c[1] * zparts[1] + out.c[2] * zparts[2];
  return out;
}

namespace {

// Frame velocity of the path at time t: for position g and coordinate
// velocity d, the right-invariant velocity is (d1, d2, d3 - g.y1 * d2).
std::array<double, 3> path_frame_velocity(const GPath& path, double t) {
  const GroupElem g = path.pos(t);
  const auto d = path.coord_vel(t);
  return {d[0], d[1], d[2] - g.y1 * d[1]};
}

struct LiftState {
  double z;
  GroupElem xi;
};

struct LiftDeriv {
  double zdot;
  std::array<double, 3> xidot;
  std::array<double, 3> c;
};

// Tangency plus development: xi' = (c1, c2, c3 + c2 * xi1) from the
// left-increment ODE xi(t+dt) = exp(dt c) * xi(t).
LiftDeriv lift_deriv(const ActionFields& fields, const GPath& path, double t,
                     const LiftState& s) {
  const NilPoint base = canonicalize(path.pos(t));
  const auto w = path_frame_velocity(path, t);
  const LeafSolve ls = solve_leaf_coefficients(fields, MPoint{base, s.z}, w);
  LiftDeriv d;
  d.zdot = ls.zdot;
  d.c = ls.c;
  d.xidot = {ls.c[0], ls.c[1], ls.c[2] + ls.c[1] * s.xi.y1};
  return d;
}

}  // namespace

LiftResult lift_path(const ActionFields& fields, const GPath& path, double z0,
                     double dt) {
  if (std::abs(z0) >= fields.eps / 2.0) {
    throw std::invalid_argument(
        "lift_path: start height outside the goodness window |z| < eps/2");
  }
  if (dt <= 0.0) throw std::invalid_argument("lift_path: need dt > 0");
  LiftResult res;
  LiftState s{z0, identity_elem()};
  double t = 0.0;
  {
    const LiftDeriv d0 = lift_deriv(fields, path, 0.0, s);
    res.traj.samples.push_back({0.0, MPoint{canonicalize(path.pos(0.0)), z0}});
    res.traj.leaf_coeffs.push_back(d0.c);
  }
  const long nsteps = static_cast<long>(std::ceil(1.0 / dt - 1e-12));
  for (long k = 0; k < nsteps; ++k) {
    const double h = std::min(dt, 1.0 - t);
    auto step = [&](double dt_frac, const LiftDeriv& d) {
      return LiftState{
          s.z + dt_frac * d.zdot,
          GroupElem{s.xi.y1 + dt_frac * d.xidot[0],
                    s.xi.y2 + dt_frac * d.xidot[1],
                    s.xi.y3 + dt_frac * d.xidot[2]}};
    };
    const LiftDeriv k1 = lift_deriv(fields, path, t, s);
    const LiftDeriv k2 = lift_deriv(fields, path, t + h / 2.0, step(h / 2.0, k1));
    const LiftDeriv k3 = lift_deriv(fields, path, t + h / 2.0, step(h / 2.0, k2));
    const LiftDeriv k4 = lift_deriv(fields, path, t + h, step(h, k3));
    LiftState snew;
    snew.z = s.z + (h / 6.0) * (k1.zdot + 2.0 * k2.zdot + 2.0 * k3.zdot +
                                k4.zdot);
    snew.xi.y1 = s.xi.y1 + (h / 6.0) * (k1.xidot[0] + 2.0 * k2.xidot[0] +
                                        2.0 * k3.xidot[0] + k4.xidot[0]);
    snew.xi.y2 = s.xi.y2 + (h / 6.0) * (k1.xidot[1] + 2.0 * k2.xidot[1] +
                                        2.0 * k3.xidot[1] + k4.xidot[1]);
    snew.xi.y3 = s.xi.y3 + (h / 6.0) * (k1.xidot[2] + 2.0 * k2.xidot[2] +
                                        2.0 * k3.xidot[2] + k4.xidot[2]);
    const double tnew = t + h;
    if (std::abs(snew.z) >= fields.eps) {
      const double za = std::abs(s.z), zb = std::abs(snew.z);
      const double frac = (zb > za) ? (fields.eps - za) / (zb - za) : 1.0;
      res.exit = StripExit{t + frac * h, snew.z};
      res.final_z = snew.z;
      res.development = snew.xi;
      return res;
    }
    s = snew;
    t = tnew;
    const LiftDeriv dnext = lift_deriv(fields, path, t, s);
    res.traj.samples.push_back({t, MPoint{canonicalize(path.pos(t)), s.z}});
    res.traj.leaf_coeffs.push_back(dnext.c);
  }
  res.final_z = s.z;
  res.development = s.xi;
  return res;
}

namespace {

std::array<double, 3> catmull_midpoint(const std::array<double, 3>& a,
                                       const std::array<double, 3>& b,
                                       const std::array<double, 3>& c,
                                       const std::array<double, 3>& d) {
  std::array<double, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = (-a[i] + 9.0 * b[i] + 9.0 * c[i] - d[i]) / 16.0;
  }
  return out;
}

}  // namespace

GroupElem group_development(const Trajectory& leafpath) {
  if (!leafpath.has_leaf_coeffs()) {
    throw std::invalid_argument(
        "group_development: trajectory carries no leaf coefficients");
  }
  const auto& S = leafpath.samples;
  const auto& C = leafpath.leaf_coeffs;
  GroupElem xi;
  const std::size_t n = S.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = S[k + 1].t - S[k].t;
    const auto& ca = C[k];
    const auto& cb = C[k + 1];
    const auto& cm = catmull_midpoint(C[k == 0 ? 0 : k - 1], ca, cb,
                                      C[std::min(k + 2, n - 1)]);
    // RK4 on xi' = (c1, c2, c3 + c2 xi1) over the interval.
    auto f = [](const std::array<double, 3>& c, const GroupElem& x) {
      return std::array<double, 3>{c[0], c[1], c[2] + c[1] * x.y1};
    };
    const auto k1 = f(ca, xi);
    const auto k2 = f(cm, GroupElem{xi.y1 + 0.5 * h * k1[0],
                                    xi.y2 + 0.5 * h * k1[1],
                                    xi.y3 + 0.5 * h * k1[2]});
    const auto k3 = f(cm, GroupElem{xi.y1 + 0.5 * h * k2[0],
                                    xi.y2 + 0.5 * h * k2[1],
                                    xi.y3 + 0.5 * h * k2[2]});
    const auto k4 = f(cb, GroupElem{xi.y1 + h * k3[0], xi.y2 + h * k3[1],
                                    xi.y3 + h * k3[2]});
    xi.y1 += (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    xi.y2 += (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    xi.y3 += (h / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
  }
  return xi;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,y1,y2,y3,z\n";
  char buf[160];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                  s.p.base.y1, s.p.base.y2, s.p.base.y3, s.p.z);
    out += buf;
  }
  return out;
}

}  // namespace heislab
