#pragma once

#include <cstdint>
#include <random>

#include "heislab/heis.hpp"

/// Compact quotient G/H where H < G is the subgroup of integer-entry
/// matrices, acting on the right.  Representatives live in the fundamental
/// cube [0,1)^3; the face gluings are
///
///   (y1, y2, 0) ~ (y1, y2, 1)
///   (y1, 0, y3) ~ (y1, 1, y3)
///   (0, y2, y3) ~ (1, y2, y2 + y3)
///
/// equivalently (y1, y2, y3) ~ (y1 + m, y2 + n, y3 + y2*m + k) for integers
/// m, n, k.  The strip M = G/H x (-eps, eps) is the phase space for actions.

namespace heislab {

/// Canonical representative in [0,1)^3.
struct NilPoint {
  double y1 = 0.0;
  double y2 = 0.0;
  double y3 = 0.0;
};

/// Point of the strip M = G/H x (-eps, eps).
struct MPoint {
  NilPoint base;
  double z = 0.0;
};

/// Reduce a group element to its canonical cube representative.  Reduction
/// order matters: the y1-shift feeds y2*m into y3, so y1 is reduced first,
/// then y2 (which leaves y3 alone), then y3.
NilPoint canonicalize(const GroupElem& g);

/// The representative as a group element.
inline GroupElem lift(const NilPoint& p) { return {p.y1, p.y2, p.y3}; }

/// Chordal distance on the quotient: Euclidean distance minimized over
/// lattice translates of either argument (symmetrized so that the result is
/// exactly symmetric; the k-range is wide enough to cover the shear y2*m).
/// Not a geodesic metric, but faithful at small separations, which is what
/// the convergence and continuity checks need.
double quotient_dist(const NilPoint& p, const NilPoint& q);

bool same_point(const NilPoint& p, const NilPoint& q, double tol);

/// Left translation g . (pH) = (g p)H, the action map of the identity
/// homomorphism.  H acts trivially only at the origin coset.
NilPoint left_translate(const GroupElem& g, const NilPoint& p);

/// Haar measure on G/H is Lebesgue on the fundamental cube, so sampling is
/// three independent uniforms.  Same seed, same sequence.
class HaarSampler {
 public:
  explicit HaarSampler(std::uint64_t seed) : rng_(seed) {}

  NilPoint sample();

  /// Uniform draw from [0,1) with platform-independent mapping.
  double uniform();

  /// Uniform draw from [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 rng_;
};

}  // namespace heislab
