#include "heislab/actions.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace heislab {

namespace {

double poly_eval(const Poly& p, double z) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Poly poly_deriv(const Poly& p) {
  Poly d;
  for (std::size_t k = 1; k < p.size(); ++k) {
    d.push_back(static_cast<double>(k) * p[k]);
  }
  return d;
}

double max_abs4(const FrameCoeffs& f) {
  return std::max(std::max(std::abs(f.y1), std::abs(f.y2)),
                  std::max(std::abs(f.y3), std::abs(f.z)));
}

FrameCoeffs sub4(const FrameCoeffs& a, const FrameCoeffs& b) {
  return {a.y1 - b.y1, a.y2 - b.y2, a.y3 - b.y3, a.z - b.z};
}

}  // namespace

double HomMatrix::constraint_residual() const {
  const double r33 = m(2, 2) - (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  return std::max(std::max(std::abs(m(0, 2)), std::abs(m(1, 2))),
                  std::abs(r33));
}

HomMatrix hom_identity() {
  HomMatrix A;
  A(0, 0) = A(1, 1) = A(2, 2) = 1.0;
  return A;
}

std::function<GroupElem(const GroupElem&)> hom_from_matrix(const HomMatrix& A) {
  if (A.constraint_residual() > 1e-9) {
    throw std::invalid_argument(
        "hom_from_matrix: matrix violates a13 = a23 = 0, a33 = det of "
        "abelianized block");
  }
  if (std::abs(A.m.det()) < 1e-12) {
    throw std::invalid_argument("hom_from_matrix: matrix is not invertible");
  }
  const Mat3 m = A.m;
  return [m](const GroupElem& g) {
    const AlgebraVec v = alg_log(g);
    const AlgebraVec w{m(0, 0) * v.v1 + m(0, 1) * v.v2 + m(0, 2) * v.v3,
                       m(1, 0) * v.v1 + m(1, 1) * v.v2 + m(1, 2) * v.v3,
                       m(2, 0) * v.v1 + m(2, 1) * v.v2 + m(2, 2) * v.v3};
    return alg_exp(w);
  };
}

HomMatrix AutoFamily::at(double z) const { return A(z); }

HomMatrix AutoFamily::deriv(double z) const {
  if (dA) return dA(z);
  double h = 1e-5;
  const double room = eps - std::abs(z);
  if (room < 2.0 * h) h = room / 2.0;
  const HomMatrix hi = A(z + h), lo = A(z - h);
  HomMatrix d;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) d(i, j) = (hi(i, j) - lo(i, j)) / (2.0 * h);
  }
  return d;
}

AutoFamily identity_family(double eps) {
  AutoFamily fam;
  fam.eps = eps;
  fam.A = [](double) { return hom_identity(); };
  fam.dA = [](double) { return HomMatrix{}; };
  return fam;
}

AutoFamily linear_family(const Mat3& B, double eps) {
  if (std::abs(B(0, 2)) > 1e-9 || std::abs(B(1, 2)) > 1e-9) {
    throw std::invalid_argument("linear_family: b13, b23 must vanish");
  }
  if (std::abs(B(2, 2) - (B(0, 0) + B(1, 1))) > 1e-9) {
    throw std::invalid_argument("linear_family: b33 must equal b11 + b22");
  }
  const double det2 = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
  if (std::abs(det2) > 1e-9) {
    throw std::invalid_argument(
        "linear_family: abelianized block of B must be singular, otherwise "
        "I + zB leaves the automorphism variety");
  }
  AutoFamily fam;
  fam.eps = eps;
  fam.A = [B](double z) {
    HomMatrix A;
    A(0, 0) = 1.0 + z * B(0, 0);
    A(0, 1) = z * B(0, 1);
    A(1, 0) = z * B(1, 0);
    A(1, 1) = 1.0 + z * B(1, 1);
    A(2, 0) = z * B(2, 0);
    A(2, 1) = z * B(2, 1);
    // Product form keeps the a33 constraint exact even when the block
    // determinant is only zero to tolerance.
    A(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    return A;
  };
  fam.dA = [B](double z) {
    HomMatrix d;
    d(0, 0) = B(0, 0);
    d(0, 1) = B(0, 1);
    d(1, 0) = B(1, 0);
    d(1, 1) = B(1, 1);
    d(2, 0) = B(2, 0);
    d(2, 1) = B(2, 1);
    d(2, 2) = B(0, 0) * (1.0 + z * B(1, 1)) + (1.0 + z * B(0, 0)) * B(1, 1) -
              2.0 * z * B(0, 1) * B(1, 0);
    return d;
  };
  return fam;
}

AutoFamily mixed_family(double lambda, double eps) {
  AutoFamily fam;
  fam.eps = eps;
  fam.A = [lambda](double z) {
    HomMatrix A;
    A(0, 0) = std::exp(-lambda * z);
    A(1, 1) = std::exp(2.0 * lambda * z);
    A(2, 2) = std::exp(lambda * z);
    return A;
  };
  fam.dA = [lambda](double z) {
    HomMatrix d;
    d(0, 0) = -lambda * std::exp(-lambda * z);
    d(1, 1) = 2.0 * lambda * std::exp(2.0 * lambda * z);
    d(2, 2) = lambda * std::exp(lambda * z);
    return d;
  };
  return fam;
}

AutoFamily polynomial_family(const Poly& a11, const Poly& a12, const Poly& a21,
                             const Poly& a22, const Poly& a31, const Poly& a32,
                             double eps) {
  const std::array<const Poly*, 6> entries{&a11, &a12, &a21,
                                           &a22, &a31, &a32};
  const std::array<double, 6> at0_expected{1.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  for (int i = 0; i < 6; ++i) {
    const double v = poly_eval(*entries[i], 0.0);
    if (std::abs(v - at0_expected[i]) > 1e-12) {
      throw std::invalid_argument("polynomial_family: A(0) must be identity");
    }
  }
  struct Data {
    Poly p11, p12, p21, p22, p31, p32;
    Poly d11, d12, d21, d22, d31, d32;
  };
  auto data = std::make_shared<Data>();
  data->p11 = a11;
  data->p12 = a12;
  data->p21 = a21;
  data->p22 = a22;
  data->p31 = a31;
  data->p32 = a32;
  data->d11 = poly_deriv(a11);
  data->d12 = poly_deriv(a12);
  data->d21 = poly_deriv(a21);
  data->d22 = poly_deriv(a22);
  data->d31 = poly_deriv(a31);
  data->d32 = poly_deriv(a32);

  AutoFamily fam;
  fam.eps = eps;
  fam.A = [data](double z) {
    HomMatrix A;
    A(0, 0) = poly_eval(data->p11, z);
    A(0, 1) = poly_eval(data->p12, z);
    A(1, 0) = poly_eval(data->p21, z);
    A(1, 1) = poly_eval(data->p22, z);
    A(2, 0) = poly_eval(data->p31, z);
    A(2, 1) = poly_eval(data->p32, z);
    A(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    return A;
  };
  fam.dA = [data](double z) {
    HomMatrix d;
    d(0, 0) = poly_eval(data->d11, z);
    d(0, 1) = poly_eval(data->d12, z);
    d(1, 0) = poly_eval(data->d21, z);
    d(1, 1) = poly_eval(data->d22, z);
    d(2, 0) = poly_eval(data->d31, z);
    d(2, 1) = poly_eval(data->d32, z);
    d(2, 2) = d(0, 0) * poly_eval(data->p22, z) +
              poly_eval(data->p11, z) * d(1, 1) -
              d(0, 1) * poly_eval(data->p21, z) -
              poly_eval(data->p12, z) * d(1, 0);
    return d;
  };
  return fam;
}

Mat2 a_sharp(const AutoFamily& fam, double z) {
  if (std::abs(z) >= fam.eps) {
    throw std::domain_error("a_sharp: z outside the strip");
  }
  return fam.deriv(z).upper2();
}

ActionFields fields_from_family(const AutoFamily& fam) {
  ActionFields out;
  out.eps = fam.eps;
  for (int j = 0; j < 3; ++j) {
    out.X[j] = [fam, j](const MPoint& p) {
      const HomMatrix A = fam.at(p.z);
      return FrameCoeffs{A(0, j), A(1, j), A(2, j), 0.0};
    };
  }
  return out;
}

double Bump::operator()(double z) const {
  const double t = z / support;
  if (std::abs(t) >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - t * t));
}

double PerturbationSpec::c(int i, int j) const {
  const double qi = (i == 1) ? q1 : (i == 2) ? q2 : q4;
  const double pj = (j == 1) ? p1 : p2;
  return qi * pj;
}

PerturbationSpec make_nilpotent_spec(const AutoFamily& fam, const Bump& bump) {
  const HomMatrix B = fam.deriv(0.0);
  const auto kv = smallest_right_singular_vector(B.upper2());
  PerturbationSpec spec;
  spec.p2 = kv[0];
  spec.p1 = -kv[1];
  spec.q4 = 1.0;
  // Minimum-norm (q1, q2) solving q1 p1 + q2 p2 = -(b32 p1 - b31 p2); with
  // the unit kernel vector the multiplier is just the right-hand side.
  const double rhs = -(B(2, 1) * spec.p1 - B(2, 0) * spec.p2);
  spec.q1 = rhs * spec.p1;
  spec.q2 = rhs * spec.p2;
  spec.bump = bump;
  return spec;
}

ActionFields perturb_nilpotent(const AutoFamily& fam,
                               const PerturbationSpec& spec) {
  const HomMatrix B = fam.deriv(0.0);
  const Mat2 b2 = B.upper2();
  if (b2.square().max_abs() > 1e-9 || std::abs(b2.trace()) > 1e-9 ||
      std::abs(b2.det()) > 1e-9) {
    throw std::invalid_argument(
        "perturb_nilpotent: A#(0) is not nilpotent, Theorem-1 construction "
        "does not apply");
  }
  if (std::abs(B(0, 2)) > 1e-9 || std::abs(B(1, 2)) > 1e-9 ||
      std::abs(B(2, 2)) > 1e-9) {
    throw std::invalid_argument(
        "perturb_nilpotent: A'(0) central column must vanish");
  }
  const double pn = std::hypot(spec.p1, spec.p2);
  if (pn < 1e-12) {
    throw std::invalid_argument("perturb_nilpotent: kernel vector is zero");
  }
  if (std::abs(spec.q4) < 1e-12) {
    throw std::invalid_argument("perturb_nilpotent: q4 must be nonzero");
  }
  // (p2, -p1) must lie in ker A#(0); tolerance scales with the nilpotency
  // tolerance of the block itself.
  const double ker1 = b2.a11 * spec.p2 - b2.a12 * spec.p1;
  const double ker2 = b2.a21 * spec.p2 - b2.a22 * spec.p1;
  if (std::max(std::abs(ker1), std::abs(ker2)) > 1e-8 * std::max(1.0, pn)) {
    throw std::invalid_argument(
        "perturb_nilpotent: (p2, -p1) is not in the kernel of A#(0)");
  }
  const double qres = spec.q1 * spec.p1 + spec.q2 * spec.p2 +
                      spec.q4 * (B(2, 1) * spec.p1 - B(2, 0) * spec.p2);
  if (std::abs(qres) > 1e-12 * std::max(1.0, pn)) {
    throw std::invalid_argument(
        "perturb_nilpotent: (q1, q2, q4) violates the q-equation");
  }
  const double c11 = spec.c(1, 1), c21 = spec.c(2, 1), c41 = spec.c(4, 1);
  const double c12 = spec.c(1, 2), c22 = spec.c(2, 2), c42 = spec.c(4, 2);
  if (std::abs(c41) < 1e-15 && std::abs(c42) < 1e-15) {
    throw std::invalid_argument(
        "perturb_nilpotent: both Z-coefficients vanish, perturbation is "
        "horizontal");
  }
  const double b11 = B(0, 0), b12 = B(0, 1), b21 = B(1, 0), b22 = B(1, 1);
  const double b31 = B(2, 0), b32 = B(2, 1);
  const Bump psi = spec.bump;

  ActionFields out;
  out.eps = fam.eps;
  out.X[0] = [=](const MPoint& p) {
    const double s = psi(p.z);
    return FrameCoeffs{1.0 + p.z * b11 + s * c11, p.z * b21 + s * c21,
                       p.z * b31, s * c41};
  };
  out.X[1] = [=](const MPoint& p) {
    const double s = psi(p.z);
    return FrameCoeffs{p.z * b12 + s * c12, 1.0 + p.z * b22 + s * c22,
                       p.z * b32, s * c42};
  };
  out.X[2] = [](const MPoint&) { return FrameCoeffs{0.0, 0.0, 1.0, 0.0}; };
  return out;
}

ActionFields perturb_mixed(double lambda, double c, double eps) {
  if (std::abs(lambda) < 1e-12) {
    throw std::invalid_argument("perturb_mixed: lambda must be nonzero");
  }
  ActionFields out;
  out.eps = eps;
  out.X[0] = [lambda](const MPoint& p) {
    return FrameCoeffs{std::exp(-lambda * p.z), 0.0, 0.0, 0.0};
  };
  out.X[1] = [lambda, c](const MPoint& p) {
    return FrameCoeffs{0.0, std::exp(2.0 * lambda * p.z), 0.0,
                       -(c / lambda) * std::exp(lambda * p.z)};
  };
  out.X[2] = [lambda, c](const MPoint& p) {
    return FrameCoeffs{-c, 0.0, std::exp(lambda * p.z), 0.0};
  };
  return out;
}

namespace {

// Coordinate components (d/dy1, d/dy2, d/dy3, d/dz) of a field at a chart
// point continued from the cube representative at the chart origin.  The
// field callable sees the canonical point; the conversion uses the chart y1
// so that stencils straddling a gluing face stay consistent.
std::array<double, 4> coord_eval(const FieldFn& f, const NilPoint& origin,
                                 double z0, const std::array<double, 4>& off) {
  const double y1 = origin.y1 + off[0];
  const double y2 = origin.y2 + off[1];
  const double y3 = origin.y3 + off[2];
  const double z = z0 + off[3];
  const MPoint p{canonicalize(GroupElem{y1, y2, y3}), z};
  const FrameCoeffs w = f(p);
  return {w.y1, w.y2, w.y3 + y1 * w.y2, w.z};
}

}  // namespace

FrameCoeffs bracket_fd(const FieldFn& f1, const FieldFn& f2, const MPoint& p,
                       double eps, double h) {
  if (h <= 0.0 || h > 1e-3) {
    throw std::invalid_argument("bracket_fd: h must lie in (0, 1e-3]");
  }
  if (std::abs(p.z) + 2.0 * h >= eps) {
    throw std::domain_error("bracket_fd: z-stencil leaves the strip");
  }
  const NilPoint o = p.base;
  const double z0 = p.z;
  const std::array<double, 4> zero{0.0, 0.0, 0.0, 0.0};
  const auto F = coord_eval(f1, o, z0, zero);
  const auto G = coord_eval(f2, o, z0, zero);

  // Fourth-order Jacobians: columns J(:,dir) = d(field)/d(coord dir).
  std::array<std::array<double, 4>, 4> JF{}, JG{};
  for (int dir = 0; dir < 4; ++dir) {
    std::array<double, 4> off{0.0, 0.0, 0.0, 0.0};
    auto at = [&](double step) {
      off[dir] = step;
      return std::array<std::array<double, 4>, 2>{
          coord_eval(f1, o, z0, off), coord_eval(f2, o, z0, off)};
    };
    const auto p2 = at(2.0 * h), p1 = at(h), m1 = at(-h), m2 = at(-2.0 * h);
    for (int i = 0; i < 4; ++i) {
      JF[i][dir] = (-p2[0][i] + 8.0 * p1[0][i] - 8.0 * m1[0][i] + m2[0][i]) /
                   (12.0 * h);
      JG[i][dir] = (-p2[1][i] + 8.0 * p1[1][i] - 8.0 * m1[1][i] + m2[1][i]) /
                   (12.0 * h);
    }
  }

  // [F,G] = DG.F - DF.G in coordinates.
  std::array<double, 4> br{};
  for (int i = 0; i < 4; ++i) {
    double s = 0.0;
    for (int j = 0; j < 4; ++j) s += JG[i][j] * F[j] - JF[i][j] * G[j];
    br[i] = s;
  }
  // Back to the frame at p.
  return {br[0], br[1], br[2] - o.y1 * br[1], br[3]};
}

double RelationsReport::max_residual() const {
  return std::max(max_r12, std::max(max_r13, max_r23));
}

bool RelationsReport::pass(double tol) const { return max_residual() < tol; }

RelationsReport verify_heisenberg_relations(const ActionFields& fields,
                                            int n_samples, double h,
                                            std::uint64_t seed) {
  HaarSampler sampler(seed);
  RelationsReport rep;
  rep.n_samples = n_samples;
  rep.min_frame_volume = std::numeric_limits<double>::max();
  const double zmax = fields.eps * 0.9;
  for (int s = 0; s < n_samples; ++s) {
    const MPoint p{sampler.sample(), sampler.uniform(-zmax, zmax)};
    const FrameCoeffs x3 = fields.X[2](p);
    const FrameCoeffs b12 = bracket_fd(fields.X[0], fields.X[1], p, fields.eps, h);
    const FrameCoeffs b13 = bracket_fd(fields.X[0], fields.X[2], p, fields.eps, h);
    const FrameCoeffs b23 = bracket_fd(fields.X[1], fields.X[2], p, fields.eps, h);
    rep.max_r12 = std::max(rep.max_r12, max_abs4(sub4(b12, x3)));
    rep.max_r13 = std::max(rep.max_r13, max_abs4(b13));
    rep.max_r23 = std::max(rep.max_r23, max_abs4(b23));

    // Gram volume of the three generating fields as 4-vectors.
    const FrameCoeffs x1 = fields.X[0](p), x2 = fields.X[1](p);
    const std::array<std::array<double, 4>, 3> v{
        std::array<double, 4>{x1.y1, x1.y2, x1.y3, x1.z},
        std::array<double, 4>{x2.y1, x2.y2, x2.y3, x2.z},
        std::array<double, 4>{x3.y1, x3.y2, x3.y3, x3.z}};
    Mat3 gram;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (int k = 0; k < 4; ++k) dot += v[i][k] * v[j][k];
        gram(i, j) = dot;
      }
    }
    const double vol = std::sqrt(std::max(gram.det(), 0.0));
    rep.min_frame_volume = std::min(rep.min_frame_volume, vol);
  }
  return rep;
}

FieldFn combine_fields(const ActionFields& fields,
                       const std::array<double, 3>& w) {
  const auto X = fields.X;
  return [X, w](const MPoint& p) {
    FrameCoeffs out;
    for (int j = 0; j < 3; ++j) {
      const FrameCoeffs xj = X[j](p);
      out.y1 += w[j] * xj.y1;
      out.y2 += w[j] * xj.y2;
      out.y3 += w[j] * xj.y3;
      out.z += w[j] * xj.z;
    }
    return out;
  };
}

FieldFn constant_field(const AlgebraVec& v) {
  return [v](const MPoint&) { return FrameCoeffs{v.v1, v.v2, v.v3, 0.0}; };
}

}  // namespace heislab
