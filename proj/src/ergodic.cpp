#include "heislab/ergodic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heislab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // guard against floor rounding at the boundary
  return f;
}

TorusPoint skew_map(double c, const TorusPoint& p) {
  return {frac(p.u + c), frac(p.w + p.u)};
}

std::complex<double> monomial_eval(const Monomial& f, const TorusPoint& p) {
  const double angle = kTwoPi * (f.n * p.u + f.m * p.w);
  return {std::cos(angle), std::sin(angle)};
}

std::complex<double> birkhoff_avg(const Monomial& f, double c,
                                  const TorusPoint& p0, long N) {
  if (N < 1) throw std::invalid_argument("birkhoff_avg: need N >= 1");
  TorusPoint p = p0;
  double sr = 0.0, si = 0.0, cr = 0.0, ci = 0.0;
  for (long j = 0; j < N; ++j) {
    const std::complex<double> term = monomial_eval(f, p);
    // Kahan compensation, separately per component.
    const double yr = term.real() - cr;
    const double tr = sr + yr;
    cr = (tr - sr) - yr;
    sr = tr;
    const double yi = term.imag() - ci;
    const double ti = si + yi;
    ci = (ti - si) - yi;
    si = ti;
    p = skew_map(c, p);
  }
  return {sr / static_cast<double>(N), si / static_cast<double>(N)};
}

std::complex<double> birkhoff_closed_form(const Monomial& f, double c,
                                          const TorusPoint& p0, long N) {
  if (f.m != 0 || f.n == 0) {
    throw std::invalid_argument(
        "birkhoff_closed_form: geometric form needs m = 0, n != 0");
  }
  if (N < 1) throw std::invalid_argument("birkhoff_closed_form: need N >= 1");
  auto unit = [](double angle_turns) -> std::complex<double> {
    const double a = kTwoPi * frac(angle_turns);
    return {std::cos(a), std::sin(a)};
  };
  const std::complex<double> zn = unit(f.n * p0.u);
  const std::complex<double> an = unit(f.n * c);
  if (std::abs(an - 1.0) < 1e-12) return zn;
  const std::complex<double> aNn = unit(static_cast<double>(N) * f.n * c);
  return zn * (aNn - 1.0) / (static_cast<double>(N) * (an - 1.0));
}

Vec2 return_map(double v2, double v3, double y1_section, const Vec2& p) {
  return {frac(p[0] + v2),
          frac(p[1] - p[0] + v3 + (y1_section - 0.5) * v2)};
}

std::vector<NilPoint> unit_time_orbit(const AlgebraVec& v, const NilPoint& p0,
                                      long n) {
  if (n < 1) throw std::invalid_argument("unit_time_orbit: need n >= 1");
  std::vector<NilPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const GroupElem step = alg_exp(v);
  NilPoint p = p0;
  pts.push_back(p);
  for (long k = 1; k < n; ++k) {
    p = left_translate(step, p);
    pts.push_back(p);
  }
  return pts;
}

namespace {

int cell(double x, int k) {
  int i = static_cast<int>(std::floor(x * k));
  if (i < 0) i = 0;
  if (i >= k) i = k - 1;
  return i;
}

}  // namespace

double box_discrepancy(const std::vector<NilPoint>& pts, int k) {
  if (pts.empty() || k < 1) {
    throw std::invalid_argument("box_discrepancy: need points and k >= 1");
  }
  std::vector<long> counts(static_cast<std::size_t>(k) * k * k, 0);
  for (const auto& p : pts) {
    counts[(static_cast<std::size_t>(cell(p.y1, k)) * k + cell(p.y2, k)) * k +
           cell(p.y3, k)]++;
  }
  const double vol = 1.0 / (static_cast<double>(k) * k * k);
  const double n = static_cast<double>(pts.size());
  double worst = 0.0;
  for (const long c : counts) {
    worst = std::max(worst, std::abs(static_cast<double>(c) / n - vol));
  }
  return worst;
}

double box_discrepancy(const std::vector<Vec2>& pts, int k) {
  if (pts.empty() || k < 1) {
    throw std::invalid_argument("box_discrepancy: need points and k >= 1");
  }
  std::vector<long> counts(static_cast<std::size_t>(k) * k, 0);
  for (const auto& p : pts) {
    counts[static_cast<std::size_t>(cell(p[0], k)) * k + cell(p[1], k)]++;
  }
  const double vol = 1.0 / (static_cast<double>(k) * k);
  const double n = static_cast<double>(pts.size());
  double worst = 0.0;
  for (const long c : counts) {
    worst = std::max(worst, std::abs(static_cast<double>(c) / n - vol));
  }
  return worst;
}

AlgebraVec tau_tilde(const ActionFields& fields, const MPoint& p,
                     const AlgebraVec& v) {
  const LeafSolve ls = solve_leaf_coefficients(fields, p, {v.v1, v.v2, v.v3});
  return {ls.c[0], ls.c[1], ls.c[2]};
}

DriftReport tau_ab(const ActionFields& fields, const MPoint& p0,
                   const AlgebraVec& v, double T, double dt,
                   std::optional<double> slope) {
  if (dt <= 0.0 || T <= 0.0) {
    throw std::invalid_argument("tau_ab: need dt > 0 and T > 0");
  }
  if (std::abs(p0.z) >= fields.eps) {
    throw std::invalid_argument("tau_ab: start point outside the strip");
  }
  if (slope && std::abs(v.v1 + *slope * v.v2) > 1e-9) {
    throw std::invalid_argument(
        "tau_ab: v is not in the horizontal subalgebra for the given slope");
  }
  const long nsteps = std::max<long>(4, std::llround(T / dt));
  DriftReport rep;
  rep.dt = dt;
  rep.horizon = static_cast<double>(nsteps) * dt;

  const GroupElem ghalf = alg_exp(scale(dt / 2.0, v));
  const GroupElem gfull = alg_exp(scale(dt, v));
  NilPoint b = p0.base;
  double z = p0.z;
  double i1 = 0.0, i2 = 0.0;

  // d/ds of (z, I1, I2): the Y-part of the velocity is v by construction,
  // so only the height and the Ab(tau_tilde) integral need quadrature.
  auto deriv = [&](const NilPoint& base, double zz) -> std::array<double, 3> {
    const LeafSolve ls =
        solve_leaf_coefficients(fields, MPoint{base, zz}, {v.v1, v.v2, v.v3});
    return {ls.zdot, ls.c[0], ls.c[1]};
  };

  for (long k = 0; k < nsteps; ++k) {
    const NilPoint bh = left_translate(ghalf, b);
    const NilPoint bn = left_translate(gfull, b);
    const auto d1 = deriv(b, z);
    const auto d2 = deriv(bh, z + 0.5 * dt * d1[0]);
    const auto d3 = deriv(bh, z + 0.5 * dt * d2[0]);
    const auto d4 = deriv(bn, z + dt * d3[0]);
    const double znew =
        z + (dt / 6.0) * (d1[0] + 2.0 * d2[0] + 2.0 * d3[0] + d4[0]);
    const double t = static_cast<double>(k) * dt;
    if (std::abs(znew) >= fields.eps) {
      const double za = std::abs(z), zb = std::abs(znew);
      const double f = (zb > za) ? (fields.eps - za) / (zb - za) : 1.0;
      rep.exit = StripExit{t + f * dt, znew};
      if (t > 0.0) rep.value = {i1 / t, i2 / t};
      return rep;
    }
    i1 += (dt / 6.0) * (d1[1] + 2.0 * d2[1] + 2.0 * d3[1] + d4[1]);
    i2 += (dt / 6.0) * (d1[2] + 2.0 * d2[2] + 2.0 * d3[2] + d4[2]);
    z = znew;
    b = bn;
    const long done = k + 1;
    if (done == nsteps / 4 || done == nsteps / 2 || done == nsteps) {
      const double s = static_cast<double>(done) * dt;
      rep.trend.push_back({i1 / s, i2 / s});
    }
  }
  rep.value = rep.trend.back();
  if (rep.trend.size() >= 2) {
    const Vec2& a = rep.trend[rep.trend.size() - 2];
    const Vec2& c = rep.trend.back();
    rep.converged = std::hypot(c[0] - a[0], c[1] - a[1]) < 1e-3;
  }
  return rep;
}

Vec2 xi_ab_e3(const ActionFields& fields, const MPoint& p0, double dt) {
  const GPath loop = generator_path(lift(p0.base), 3, 1.0);
  const LiftResult lr = lift_path(fields, loop, p0.z, dt);
  if (!lr.completed()) {
    throw std::runtime_error("xi_ab_e3: the gamma_3 lift left the strip");
  }
  return ab_group(lr.development);
}

}  // namespace heislab
