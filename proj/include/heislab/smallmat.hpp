#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

/// Dense 2x2 / 3x3 helpers used by the frame solves and the classifier.
/// Everything here is closed-form; no external linear algebra is needed at
/// these sizes.

namespace heislab {

struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }

  std::array<double, 2> apply(const std::array<double, 2>& u) const {
    return {a11 * u[0] + a12 * u[1], a21 * u[0] + a22 * u[1]};
  }

  Mat2 square() const {
    return {a11 * a11 + a12 * a21, a11 * a12 + a12 * a22,
            a21 * a11 + a22 * a21, a21 * a12 + a22 * a22};
  }

  double max_abs() const {
    return std::max(std::max(std::abs(a11), std::abs(a12)),
                    std::max(std::abs(a21), std::abs(a22)));
  }
};

/// Eigenvalues via the quadratic formula; complex pair when the
/// discriminant is negative.
inline std::array<std::complex<double>, 2> eigenvalues(const Mat2& m) {
  const double tr = m.trace();
  const double disc = tr * tr - 4.0 * m.det();
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return {std::complex<double>((tr + s) / 2.0, 0.0),
            std::complex<double>((tr - s) / 2.0, 0.0)};
  }
  const double s = std::sqrt(-disc);
  return {std::complex<double>(tr / 2.0, s / 2.0),
          std::complex<double>(tr / 2.0, -s / 2.0)};
}

/// Right singular vector for the smallest singular value, i.e. the unit
/// eigenvector of M^T M for its smaller eigenvalue.  Deterministic
/// tie-breaks: an (exactly) diagonal M^T M picks the axis of the smaller
/// diagonal entry, e1 on a tie.  Sign: first entry above 1e-14 is positive.
inline std::array<double, 2> smallest_right_singular_vector(const Mat2& m) {
  const double a = m.a11 * m.a11 + m.a21 * m.a21;  // (M^T M)_11
  const double b = m.a11 * m.a12 + m.a21 * m.a22;  // (M^T M)_12
  const double c = m.a12 * m.a12 + m.a22 * m.a22;  // (M^T M)_22
  double vx, vy;
  if (b == 0.0) {
    if (a <= c) {
      vx = 1.0;
      vy = 0.0;
    } else {
      vx = 0.0;
      vy = 1.0;
    }
  } else {
    const double lam = 0.5 * (a + c - std::sqrt((a - c) * (a - c) + 4 * b * b));
    // (a - lam) vx + b vy = 0 and b vx + (c - lam) vy = 0; use the better
    // conditioned row.
    if (std::abs(a - lam) >= std::abs(c - lam)) {
      vx = -b;
      vy = a - lam;
    } else {
      vx = c - lam;
      vy = -b;
    }
    const double n = std::sqrt(vx * vx + vy * vy);
    vx /= n;
    vy /= n;
  }
  const double lead = (std::abs(vx) > 1e-14) ? vx : vy;
  if (lead < 0.0) {
    vx = -vx;
    vy = -vy;
  }
  return {vx, vy};
}

struct Mat3 {
  // Row-major entries.
  std::array<std::array<double, 3>, 3> a{};

  double& operator()(int i, int j) { return a[i][j]; }
  double operator()(int i, int j) const { return a[i][j]; }

  double det() const {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }
};

/// Solve M x = rhs by Gaussian elimination with partial pivoting.
/// Throws std::domain_error on a (numerically) singular matrix.
inline std::array<double, 3> solve3(Mat3 m, std::array<double, 3> rhs) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    }
    if (std::abs(m(piv, col)) < 1e-13) {
      throw std::domain_error("solve3: singular frame matrix");
    }
    if (piv != col) {
      std::swap(m.a[piv], m.a[col]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (int r = col + 1; r < 3; ++r) {
      const double f = m(r, col) / m(col, col);
      for (int c = col; c < 3; ++c) m(r, c) -= f * m(col, c);
      rhs[r] -= f * rhs[col];
    }
  }
  std::array<double, 3> x{};
  for (int i = 2; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < 3; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

}  // namespace heislab
