#include "heislab/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace heislab {

MonotoneInterpolant::MonotoneInterpolant(std::vector<double> x,
                                         std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw std::invalid_argument("MonotoneInterpolant: need >= 2 samples");
  }
  d_.assign(n, 0.0);
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    if (h[k] <= 0.0) {
      throw std::invalid_argument("MonotoneInterpolant: x not increasing");
    }
    delta[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  // Fritsch-Carlson slopes: harmonic mean inside, clamped three-point
  // formula at the ends.
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      d_[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) {
      d = 0.0;
    } else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) {
      d = 3.0 * d0;
    }
    return d;
  };
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
  } else {
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }
}

bool MonotoneInterpolant::in_domain(double t) const {
  return !x_.empty() && t >= x_.front() && t <= x_.back();
}

double MonotoneInterpolant::operator()(double t) const {
  if (!in_domain(t)) {
    throw std::domain_error("MonotoneInterpolant: argument outside domain");
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t k = (it == x_.begin()) ? 0 : (it - x_.begin() - 1);
  if (k + 1 >= x_.size()) k = x_.size() - 2;
  const double h = x_[k + 1] - x_[k];
  const double s = (t - x_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * y_[k] + (s3 - 2.0 * s2 + s) * h * d_[k] +
         (-2.0 * s3 + 3.0 * s2) * y_[k + 1] + (s3 - s2) * h * d_[k + 1];
}

std::optional<double> MonotoneInterpolant::try_eval(double t) const {
  if (!in_domain(t)) return std::nullopt;
  return (*this)(t);
}

std::optional<double> HolonomyMaps::eval_f(int i, double z) const {
  return f[i].try_eval(z);
}

std::optional<double> HolonomyMaps::eval_finv(int i, double z) const {
  if (has_inverse_samples) return finv[i].try_eval(z);
  // Functional inverse of the forward interpolant by bisection.
  double lo = f[i].domain_lo(), hi = f[i].domain_hi();
  double flo = f[i](lo), fhi = f[i](hi);
  if (z < flo || z > fhi) return std::nullopt;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f[i](mid) < z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double HolonomyMaps::max_displacement(int i) const {
  double m = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    m = std::max(m, std::abs(f_vals[i][k] - grid[k]));
  }
  return m;
}

HolonomyMaps holonomy_maps(const ActionFields& fields, const GroupElem& g0,
                           const GridSpec& spec, int jobs) {
  if (spec.n_points < 8) {
    throw std::invalid_argument("holonomy_maps: need at least 8 grid points");
  }
  // Precondition: the fields actually generate a Heisenberg action.
  const RelationsReport rel =
      verify_heisenberg_relations(fields, 20, 1e-4, 0x9e3779b97f4a7c15ull);
  if (!rel.pass(1e-5)) {
    throw std::invalid_argument(
        "holonomy_maps: fields fail the bracket relations, not an action");
  }

  HolonomyMaps maps;
  maps.base = g0;
  maps.eps = fields.eps;
  const int n = spec.n_points;
  maps.grid.resize(n);
  for (int k = 0; k < n; ++k) {
    maps.grid[k] = -fields.eps / 2.0 +
                   (k + 1) * fields.eps / static_cast<double>(n + 1);
  }
  for (int i = 0; i < 3; ++i) {
    maps.f_vals[i].assign(n, 0.0);
    maps.finv_vals[i].assign(n, 0.0);
  }

  auto lift_block = [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      for (int i = 0; i < 3; ++i) {
        for (const double s : {1.0, -1.0}) {
          const GPath path = generator_path(g0, i + 1, s);
          const LiftResult lr = lift_path(fields, path, maps.grid[k], spec.dt);
          if (!lr.completed()) {
            std::ostringstream msg;
            msg << "holonomy_maps: lift of generator " << (i + 1)
                << " from z = " << maps.grid[k] << " left the strip at t = "
                << lr.exit->time;
            throw std::runtime_error(msg.str());
          }
          (s > 0 ? maps.f_vals : maps.finv_vals)[i][k] = lr.final_z;
        }
      }
    }
  };

  const int workers = std::max(1, jobs);
  if (workers == 1) {
    lift_block(0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int b = w * chunk, e = std::min(n, b + chunk);
      if (b >= e) break;
      pool.emplace_back([&, b, e, w]() {
        try {
          lift_block(b, e);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k + 1 < n; ++k) {
      if (!(maps.f_vals[i][k + 1] > maps.f_vals[i][k])) {
        throw std::runtime_error(
            "holonomy_maps: sampled map is not strictly increasing");
      }
    }
    const double disp = [&] {
      double m = 0.0;
      for (int k = 0; k < n; ++k) {
        m = std::max(m, std::abs(maps.f_vals[i][k] - maps.grid[k]));
      }
      return m;
    }();
    if (disp > spec.delta_near) {
      std::ostringstream msg;
      msg << "holonomy_maps: map f" << (i + 1) << " strays " << disp
          << " from the identity, beyond delta_near = " << spec.delta_near
          << "; outside the excellent-foliation regime";
      throw std::domain_error(msg.str());
    }
  }

  for (int i = 0; i < 3; ++i) {
    maps.f[i] = MonotoneInterpolant(maps.grid, maps.f_vals[i]);
    maps.finv[i] = MonotoneInterpolant(maps.grid, maps.finv_vals[i]);
  }
  maps.has_inverse_samples = true;
  return maps;
}

double PseudogroupReport::max_dev() const {
  return std::max(max_dev_comm, std::max(max_dev_31, max_dev_32));
}

bool PseudogroupReport::pass(double tol) const {
  return n_checked > 0 && max_dev() < tol;
}

PseudogroupReport check_pseudogroup_relations(const HolonomyMaps& maps) {
  PseudogroupReport rep;
  auto compose4 = [&](int a, int b, int c, int d,
                      double z) -> std::optional<double> {
    // Applies f_{a}, then f_{b}, then f_{c}^{-1}, then f_{d}^{-1}.
    auto z1 = maps.eval_f(a, z);
    if (!z1) return std::nullopt;
    auto z2 = maps.eval_f(b, *z1);
    if (!z2) return std::nullopt;
    auto z3 = maps.eval_finv(c, *z2);
    if (!z3) return std::nullopt;
    return maps.eval_finv(d, *z3);
  };
  for (const double z : maps.grid) {
    const auto comm = compose4(0, 1, 0, 1, z);   // f2^-1 f1^-1 f2 f1
    const auto c31 = compose4(0, 2, 0, 2, z);    // f3^-1 f1^-1 f3 f1
    const auto c32 = compose4(1, 2, 1, 2, z);    // f3^-1 f2^-1 f3 f2
    const auto f3z = maps.eval_f(2, z);
    if (!comm || !c31 || !c32 || !f3z) {
      ++rep.n_skipped;
      continue;
    }
    rep.max_dev_comm = std::max(rep.max_dev_comm, std::abs(*comm - *f3z));
    rep.max_dev_31 = std::max(rep.max_dev_31, std::abs(*c31 - z));
    rep.max_dev_32 = std::max(rep.max_dev_32, std::abs(*c32 - z));
    ++rep.n_checked;
  }
  return rep;
}

bool is_compact_leaf(const HolonomyMaps& maps, double z0, double tol_fix) {
  for (int i = 0; i < 3; ++i) {
    const auto fz = maps.eval_f(i, z0);
    if (!fz) {
      throw std::domain_error("is_compact_leaf: z0 outside the grid");
    }
    if (std::abs(*fz - z0) > tol_fix) return false;
  }
  return true;
}

bool is_abelian_leaf(const HolonomyMaps& maps, double z0, double tol_fix) {
  const auto fz = maps.eval_f(2, z0);
  if (!fz) {
    throw std::domain_error("is_abelian_leaf: z0 outside the grid");
  }
  return std::abs(*fz - z0) <= tol_fix;
}

namespace {

// f1-orbit of z0 in both directions, extended on demand.
class OrbitCoords {
 public:
  OrbitCoords(const IntervalMap& f1, const IntervalMap& f1_inv, double z0,
              bool increasing)
      : f1_(f1), f1_inv_(f1_inv), increasing_(increasing) {
    fwd_.push_back(z0);
    bwd_.push_back(z0);
  }

  // Orbit point at integer index (negative indices via the inverse map).
  double at(long i) const {
    return (i >= 0) ? fwd_[static_cast<std::size_t>(i)]
                    : bwd_[static_cast<std::size_t>(-i)];
  }

  // Interpolated f1-coordinate of w; nullopt when the orbit cannot bracket
  // w (domain exhausted or a stalling fixed point in between).
  std::optional<double> coordinate(double w) {
    auto above = [&](double v) { return increasing_ ? (v > w) : (v < w); };
    auto at_or_below = [&](double v) {
      return increasing_ ? (v <= w) : (v >= w);
    };
    while (!above(fwd_.back())) {
      const auto next = f1_(fwd_.back());
      if (!next || total() > kMaxOrbit) return std::nullopt;
      if (std::abs(*next - fwd_.back()) < 1e-13) return std::nullopt;
      fwd_.push_back(*next);
    }
    while (!at_or_below(bwd_.back())) {
      const auto next = f1_inv_(bwd_.back());
      if (!next || total() > kMaxOrbit) return std::nullopt;
      if (std::abs(*next - bwd_.back()) < 1e-13) return std::nullopt;
      bwd_.push_back(*next);
    }
    long lo = -static_cast<long>(bwd_.size()) + 1;
    long hi = static_cast<long>(fwd_.size()) - 1;
    // Invariant: at(lo) <= w < at(hi) in orbit order; binary search for the
    // bracketing index.
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      if (at_or_below(at(mid))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double a = at(lo), b = at(lo + 1);
    return static_cast<double>(lo) + (w - a) / (b - a);
  }

 private:
  std::size_t total() const { return fwd_.size() + bwd_.size(); }
  static constexpr std::size_t kMaxOrbit = 5'000'000;

  const IntervalMap& f1_;
  const IntervalMap& f1_inv_;
  bool increasing_;
  std::vector<double> fwd_, bwd_;
};

}  // namespace

TranslationResult translation_number(const IntervalMap& f1,
                                     const IntervalMap& f1_inv,
                                     const IntervalMap& f2, double z0, int n) {
  TranslationResult res;
  const auto first = f1(z0);
  if (!first) {
    res.status = TranslationResult::Status::left_domain;
    return res;
  }
  const double d0 = *first - z0;
  if (std::abs(d0) < 1e-11) {
    res.status = TranslationResult::Status::fixed_point;
    return res;
  }
  OrbitCoords orbit(f1, f1_inv, z0, d0 > 0.0);
  double w = z0;
  for (int m = 1; m <= n; ++m) {
    const auto next = f2(w);
    if (!next) {
      res.status = TranslationResult::Status::left_domain;
      return res;
    }
    w = *next;
    const auto coord = orbit.coordinate(w);
    if (!coord) {
      res.status = TranslationResult::Status::left_domain;
      return res;
    }
    res.value = *coord / static_cast<double>(m);
    res.iterations = m;
  }
  res.status = TranslationResult::Status::ok;
  return res;
}

TranslationResult translation_number(const HolonomyMaps& maps, double z0,
                                     int n) {
  const IntervalMap f1 = [&maps](double z) { return maps.eval_f(0, z); };
  const IntervalMap f1i = [&maps](double z) { return maps.eval_finv(0, z); };
  const IntervalMap f2 = [&maps](double z) { return maps.eval_f(1, z); };
  return translation_number(f1, f1i, f2, z0, n);
}

std::string holonomy_csv(const HolonomyMaps& maps) {
  std::string out = "z,f1,f2,f3\n";
  char buf[160];
  for (std::size_t k = 0; k < maps.grid.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", maps.grid[k],
                  maps.f_vals[0][k], maps.f_vals[1][k], maps.f_vals[2][k]);
    out += buf;
  }
  return out;
}

HolonomyMaps holonomy_from_csv(const std::string& csv, double eps) {
  HolonomyMaps maps;
  maps.eps = eps;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("holonomy_from_csv: empty input");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double z, a, b, c;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &z, &a, &b, &c) != 4) {
      throw std::invalid_argument("holonomy_from_csv: malformed row");
    }
    maps.grid.push_back(z);
    maps.f_vals[0].push_back(a);
    maps.f_vals[1].push_back(b);
    maps.f_vals[2].push_back(c);
  }
  for (int i = 0; i < 3; ++i) {
    maps.f[i] = MonotoneInterpolant(maps.grid, maps.f_vals[i]);
  }
  maps.has_inverse_samples = false;
  return maps;
}

}  // namespace heislab
