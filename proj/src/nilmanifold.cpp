#include "heislab/nilmanifold.hpp"

#include <algorithm>
#include <cmath>

namespace heislab {

NilPoint canonicalize(const GroupElem& g) {
  double y1 = g.y1, y2 = g.y2, y3 = g.y3;
  // Right-multiply by (m,0,0): y1 += m, y3 += y2*m.
  const double m = -std::floor(y1);
  y1 += m;
  y3 += y2 * m;
  // Right-multiply by (0,n,0): only y2 moves.
  y2 -= std::floor(y2);
  // Right-multiply by (0,0,k).
  y3 -= std::floor(y3);
  // floor can land exactly on 1.0 when the input is a hair below an integer.
  if (y1 >= 1.0) y1 -= 1.0;
  if (y2 >= 1.0) y2 -= 1.0;
  if (y3 >= 1.0) y3 -= 1.0;
  return {y1, y2, y3};
}

namespace {

GroupElem lattice_elem(int m, int n, int k) {
  return {static_cast<double>(m), static_cast<double>(n),
          static_cast<double>(k)};
}

// min_h ||p - q*h|| over nearby lattice translates h = (m,n,k).  The shear
// y2*m can push the needed k to +-2, hence the wider k-range.
double directed_dist(const NilPoint& p, const NilPoint& q) {
  double best = elem_dist(lift(p), lift(q));
  for (int m = -1; m <= 1; ++m) {
    for (int n = -1; n <= 1; ++n) {
      for (int k = -2; k <= 2; ++k) {
        const GroupElem t = mul(lift(q), lattice_elem(m, n, k));
        best = std::min(best, elem_dist(lift(p), t));
      }
    }
  }
  return best;
}

}  // namespace

double quotient_dist(const NilPoint& p, const NilPoint& q) {
  return std::min(directed_dist(p, q), directed_dist(q, p));
}

bool same_point(const NilPoint& p, const NilPoint& q, double tol) {
  return quotient_dist(p, q) <= tol;
}

NilPoint left_translate(const GroupElem& g, const NilPoint& p) {
  return canonicalize(mul(g, lift(p)));
}

NilPoint HaarSampler::sample() {
  const double a = uniform();
  const double b = uniform();
  const double c = uniform();
  return {a, b, c};
}

double HaarSampler::uniform() {
  // 53 random bits -> [0,1); independent of distribution implementations.
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double HaarSampler::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

}  // namespace heislab
