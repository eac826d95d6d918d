#include "madphys/numerics/small_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "madphys/core/error.hpp"

namespace madphys::numerics {

namespace {

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw ArgumentError("SmallMatrix: dimension must be 2 or 3");
}

}  // namespace

SmallMatrix::SmallMatrix(int d) : dim(d) { check_dim(d); }

SmallMatrix SmallMatrix::identity(int dim) { return scalar(dim, 1.0); }

SmallMatrix SmallMatrix::scalar(int dim, double value) {
  SmallMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = value;
  return m;
}

SmallMatrix operator*(const SmallMatrix& x, const SmallMatrix& y) {
  if (x.dim != y.dim) throw ArgumentError("SmallMatrix: dimension mismatch");
  SmallMatrix r(x.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int j = 0; j < x.dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < x.dim; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

SmallVector operator*(const SmallMatrix& m, const SmallVector& v) {
  SmallVector r{};
  for (int i = 0; i < m.dim; ++i) {
    double s = 0.0;
    for (int k = 0; k < m.dim; ++k) s += m(i, k) * v[static_cast<std::size_t>(k)];
    r[static_cast<std::size_t>(i)] = s;
  }
  return r;
}

double determinant(const SmallMatrix& m) {
  if (m.dim == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

SmallMatrix invert_small_matrix(const SmallMatrix& m) {
  check_dim(m.dim);
  const double det = determinant(m);
  if (!(std::abs(det) >= 1e-14))
    throw SingularMatrixError("invert_small_matrix: determinant below 1e-14 (degenerate mass tensor)");
  SmallMatrix inv(m.dim);
  if (m.dim == 2) {
    inv(0, 0) = m(1, 1) / det;
    inv(0, 1) = -m(0, 1) / det;
    inv(1, 0) = -m(1, 0) / det;
    inv(1, 1) = m(0, 0) / det;
    return inv;
  }
  inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / det;
  inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
  inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
  inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / det;
  inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
  inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
  inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / det;
  inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
  inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
  return inv;
}

SmallVector solve_small_system(const SmallMatrix& m, const SmallVector& b) {
  check_dim(m.dim);
  if (!(std::abs(determinant(m)) >= 1e-14))
    throw SingularMatrixError("solve_small_system: determinant below 1e-14 (degenerate mass tensor)");
  const int n = m.dim;
  SmallMatrix a = m;
  SmallVector x = b;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    if (pivot != c) {
      for (int k = 0; k < n; ++k) std::swap(a(c, k), a(pivot, k));
      std::swap(x[c], x[pivot]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double factor = a(r, c) / a(c, c);
      if (factor == 0.0) continue;
      for (int k = c; k < n; ++k) a(r, k) -= factor * a(c, k);
      x[r] -= factor * x[c];
    }
  }
  for (int c = n - 1; c >= 0; --c) {
    double sum = x[c];
    for (int k = c + 1; k < n; ++k)
      if (a(c, k) != 0.0) sum -= a(c, k) * x[k];
    x[c] = sum / a(c, c);
  }
  return x;
}

double distance_from_identity(const SmallMatrix& m) {
  double worst = 0.0;
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j)
      worst = std::max(worst, std::abs(m(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

std::array<double, 3> symmetric_eigenvalues(const SmallMatrix& m) {
  if (m.dim == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double diff = m(0, 0) - m(1, 1);
    const double r = std::hypot(0.5 * diff, m(0, 1));
    return {0.5 * tr - r, 0.5 * tr + r, 0.0};
  }
  // Smith's trigonometric method for symmetric 3x3 matrices.
  const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
  const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> e{m(0, 0), m(1, 1), m(2, 2)};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                    (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  SmallMatrix b(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
  const double r = std::clamp(determinant(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> e{e1, e2, e3};
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace madphys::numerics
