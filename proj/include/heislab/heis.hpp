#pragma once

#include <array>
#include <cmath>

/// Heisenberg group G: real lower-triangular 3x3 matrices with unit diagonal,
///
///     [ 1   0   0 ]
///     [ y1  1   0 ]
///     [ y3  y2  1 ]
///
/// stored by the three free entries (y1, y2, y3).  The Lie algebra basis is
/// E1 = e21, E2 = e32, E3 = e31; E3 spans the center and [E-span] is 2-step
/// nilpotent, so exp and log are exact quadratic polynomials.

namespace heislab {

struct GroupElem {
  double y1 = 0.0;
  double y2 = 0.0;
  double y3 = 0.0;
};

/// Coordinates of v1*E1 + v2*E2 + v3*E3.
struct AlgebraVec {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
};

using Vec2 = std::array<double, 2>;

/// Matrix product; only the (3,1) entry picks up the cross term g.y2 * h.y1.
inline GroupElem mul(const GroupElem& g, const GroupElem& h) {
  return {g.y1 + h.y1, g.y2 + h.y2, g.y3 + h.y3 + g.y2 * h.y1};
}

inline GroupElem inv(const GroupElem& g) {
  return {-g.y1, -g.y2, -g.y3 + g.y1 * g.y2};
}

inline GroupElem identity_elem() { return {0.0, 0.0, 0.0}; }

/// inv(g) * inv(h) * g * h.  With this convention the commutator of the two
/// horizontal basis exponentials is exp(-E3):
/// group_commutator(exp(E1), exp(E2)) = (0, 0, -1).
inline GroupElem group_commutator(const GroupElem& g, const GroupElem& h) {
  return mul(mul(inv(g), inv(h)), mul(g, h));
}

/// exp(v) = I + V + V^2/2 exactly; V^2 only contributes v1*v2 to the center.
inline GroupElem alg_exp(const AlgebraVec& v) {
  return {v.v1, v.v2, v.v3 + 0.5 * v.v1 * v.v2};
}

inline AlgebraVec alg_log(const GroupElem& g) {
  return {g.y1, g.y2, g.y3 - 0.5 * g.y1 * g.y2};
}

/// Abelianization G -> R^2 (kills the center); a group homomorphism.
inline Vec2 ab_group(const GroupElem& g) { return {g.y1, g.y2}; }

/// Linearized abelianization on the algebra.
inline Vec2 ab_algebra(const AlgebraVec& v) { return {v.v1, v.v2}; }

/// h^{-1} u h expressed in the E-basis.  The conjugate differs from u only in
/// the central component: u^h = u + (h.y1*u.v2 - h.y2*u.v1) E3.
inline AlgebraVec conjugate_alg(const AlgebraVec& u, const GroupElem& h) {
  return {u.v1, u.v2, u.v3 + h.y1 * u.v2 - h.y2 * u.v1};
}

/// Adjoint action Ad_g(u) = g u g^{-1} = conjugate_alg(u, inv(g)).
inline AlgebraVec adjoint(const GroupElem& g, const AlgebraVec& u) {
  return {u.v1, u.v2, u.v3 - g.y1 * u.v2 + g.y2 * u.v1};
}

inline AlgebraVec scale(double s, const AlgebraVec& v) {
  return {s * v.v1, s * v.v2, s * v.v3};
}

inline AlgebraVec add(const AlgebraVec& a, const AlgebraVec& b) {
  return {a.v1 + b.v1, a.v2 + b.v2, a.v3 + b.v3};
}

inline double norm(const AlgebraVec& v) {
  return std::sqrt(v.v1 * v.v1 + v.v2 * v.v2 + v.v3 * v.v3);
}

inline double elem_dist(const GroupElem& a, const GroupElem& b) {
  const double d1 = a.y1 - b.y1, d2 = a.y2 - b.y2, d3 = a.y3 - b.y3;
  return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

inline AlgebraVec basis_e1() { return {1.0, 0.0, 0.0}; }
inline AlgebraVec basis_e2() { return {0.0, 1.0, 0.0}; }
inline AlgebraVec basis_e3() { return {0.0, 0.0, 1.0}; }

}  // namespace heislab
