#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "heislab/heis.hpp"
#include "heislab/nilmanifold.hpp"
#include "heislab/smallmat.hpp"

/// Actions of G on the strip M = G/H x (-eps, eps) of the form
/// theta(g, (pH, z)) = (phi_z(g) pH, z), where phi_z is the automorphism
/// with matrix A(z).  Differentiating at the basis exponentials produces
/// three generating fields; column j of A(z) gives the coefficients of X_j
/// in the frame (Y1, Y2, Y3) of right-invariant fields,
///
///   Y1 = d/dy1,  Y2 = d/dy2 + y1 d/dy3,  Y3 = d/dy3,  Z = d/dz,
///
/// with [Y1, Y2] = Y3 and all other frame brackets zero.  The perturbation
/// constructors append bump-supported or exponential correction terms that
/// keep [X1, X2] = X3, [X1, X3] = [X2, X3] = 0 while giving some fields a
/// Z-component, which is what makes leaves spiral out of compactness.

namespace heislab {

/// Matrix of an automorphism of G in the basis (E1, E2, E3).  Validity
/// requires a13 = a23 = 0 and a33 = a11*a22 - a12*a21: the map E_j -> (col j)
/// is a Lie algebra homomorphism exactly when the central column scales by
/// the determinant of the abelianized block.
struct HomMatrix {
  Mat3 m;

  double operator()(int i, int j) const { return m(i, j); }
  double& operator()(int i, int j) { return m(i, j); }

  /// Largest violation of the structural constraints.
  double constraint_residual() const;

  Mat2 upper2() const { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }
};

HomMatrix hom_identity();

/// The automorphism g -> exp(A log g).  Throws std::invalid_argument when
/// the constraint residual exceeds 1e-9 or det A = 0 (not invertible).
std::function<GroupElem(const GroupElem&)> hom_from_matrix(const HomMatrix& A);

/// Smooth family z -> A(z) on (-eps, eps) with A(0) = I.
struct AutoFamily {
  std::function<HomMatrix(double)> A;
  /// Analytic derivative; when absent, deriv() falls back to central
  /// differences with h = 1e-5.
  std::function<HomMatrix(double)> dA;
  double eps = 1.0;

  HomMatrix at(double z) const;
  HomMatrix deriv(double z) const;
};

AutoFamily identity_family(double eps = 1.0);

/// A(z) = I + zB.  B must have b13 = b23 = 0, b33 = b11 + b22 and
/// det(B upper block) = 0, otherwise I + zB violates the a33 constraint away
/// from z = 0 and the family is rejected.
AutoFamily linear_family(const Mat3& B, double eps = 1.0);

/// A(z) = diag(e^{-lambda z}, e^{2 lambda z}, e^{lambda z}).
AutoFamily mixed_family(double lambda, double eps = 1.0);

/// Polynomial coefficients in ascending powers of z.
using Poly = std::vector<double>;

/// Family from six entry polynomials (a13 = a23 = 0 forced, a33 computed as
/// a11*a22 - a12*a21 so the constraint holds identically).  Constant terms
/// must give A(0) = I.
AutoFamily polynomial_family(const Poly& a11, const Poly& a12, const Poly& a21,
                             const Poly& a22, const Poly& a31, const Poly& a32,
                             double eps = 1.0);

/// Derivative matrix of the abelianized block, A#(z) = [a_ij'(z)] i,j <= 2.
/// Throws std::domain_error when |z| >= eps.
Mat2 a_sharp(const AutoFamily& fam, double z);

/// Coefficients of a vector field on M in the frame (Y1, Y2, Y3, Z).
struct FrameCoeffs {
  double y1 = 0.0;
  double y2 = 0.0;
  double y3 = 0.0;
  double z = 0.0;
};

using FieldFn = std::function<FrameCoeffs(const MPoint&)>;

/// The three generating fields of an action, plus the strip halfwidth.
struct ActionFields {
  std::array<FieldFn, 3> X;
  double eps = 1.0;
};

/// Horizontal fields X_j = sum_i a_ij(z) Y_i of the unperturbed action.
ActionFields fields_from_family(const AutoFamily& fam);

/// Standard bump: amplitude * exp(1 - 1/(1 - (z/support)^2)) on
/// |z| < support, identically zero outside.  Smooth, compactly supported.
struct Bump {
  double amplitude = 0.0;
  double support = 0.1;

  double operator()(double z) const;
};

/// Data of the Theorem-1 correction terms.  With B = A'(0) the vector
/// (p2, -p1) spans (numerically) the kernel of the nilpotent block B#, and
/// (q1, q2, q4) solves q1 p1 + q2 p2 + q4 (b32 p1 - b31 p2) = 0 with q4 != 0.
/// The correction coefficients are the rank-1 products c_ij = q_i p_j.
struct PerturbationSpec {
  double p1 = 0.0, p2 = 0.0;
  double q1 = 0.0, q2 = 0.0, q4 = 1.0;
  Bump bump;

  double c(int i, int j) const;  // i in {1,2,4}, j in {1,2}
};

/// Canonical spec for a family with nilpotent B#: kernel vector from the
/// smallest-singular-value direction (unit norm, first nonzero entry
/// positive), q4 = 1 and minimum-norm (q1, q2).
PerturbationSpec make_nilpotent_spec(const AutoFamily& fam, const Bump& bump);

/// Fields of the Theorem-1 construction over the frozen linearization
/// A^(z) = I + zB:
///   X~1 = X^1 + psi(z) (c11 Y1 + c21 Y2 + c41 Z)
///   X~2 = X^2 + psi(z) (c12 Y1 + c22 Y2 + c42 Z)
///   X~3 = X^3 = Y3.
/// Requires A#(0) nilpotent and a spec satisfying the kernel and q-equation
/// constraints to 1e-12 (throws std::invalid_argument otherwise).
ActionFields perturb_nilpotent(const AutoFamily& fam,
                               const PerturbationSpec& spec);

/// Fields of the Theorem-2 construction over the mixed family:
///   X~1 = e^{-lambda z} Y1
///   X~2 = e^{2 lambda z} Y2 - (c/lambda) e^{lambda z} Z
///   X~3 = e^{lambda z} Y3 - c Y1.
/// Requires lambda != 0.
ActionFields perturb_mixed(double lambda, double c, double eps = 1.0);

/// Lie bracket [F1, F2] at p by fourth-order central differences with step h
/// in the chart continued from p's cube representative.  Throws
/// std::domain_error when the z-stencil leaves the strip.
FrameCoeffs bracket_fd(const FieldFn& f1, const FieldFn& f2, const MPoint& p,
                       double eps, double h = 1e-4);

/// Residuals of the Heisenberg relations over Haar-random sample points.
struct RelationsReport {
  double max_r12 = 0.0;  // max ||[X1,X2] - X3||_inf
  double max_r13 = 0.0;  // max ||[X1,X3]||_inf
  double max_r23 = 0.0;  // max ||[X2,X3]||_inf
  double min_frame_volume = 0.0;  // min Gram volume of (X1, X2, X3)
  int n_samples = 0;

  double max_residual() const;
  bool pass(double tol) const;
};

RelationsReport verify_heisenberg_relations(const ActionFields& fields,
                                            int n_samples, double h,
                                            std::uint64_t seed);

/// Sum of the generating fields weighted by w, as a single field.
FieldFn combine_fields(const ActionFields& fields,
                       const std::array<double, 3>& w);

/// The constant horizontal field sum_i v_i Y_i (flowed by left translation).
FieldFn constant_field(const AlgebraVec& v);

}  // namespace heislab
