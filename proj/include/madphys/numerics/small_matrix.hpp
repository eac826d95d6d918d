#pragma once

#include <array>
#include <cstddef>

namespace madphys::numerics {

/// Dense D x D matrix for D in {2, 3}, row-major in a fixed 3x3 buffer.
struct SmallMatrix {
  int dim = 2;
  std::array<double, 9> a{};

  SmallMatrix() = default;
  explicit SmallMatrix(int dim);

  static SmallMatrix identity(int dim);
  static SmallMatrix scalar(int dim, double value);

  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r * 3 + c)]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r * 3 + c)]; }
};

using SmallVector = std::array<double, 3>;

SmallMatrix operator*(const SmallMatrix& x, const SmallMatrix& y);
SmallVector operator*(const SmallMatrix& m, const SmallVector& v);

double determinant(const SmallMatrix& m);

/// Inverse via the adjugate. Throws SingularMatrixError when |det| < 1e-14.
SmallMatrix invert_small_matrix(const SmallMatrix& m);

/// Solves m x = b by Gaussian elimination with partial pivoting. A diagonal
/// m gives x_d = b_d / m_dd exactly. Throws SingularMatrixError when
/// |det| < 1e-14.
SmallVector solve_small_system(const SmallMatrix& m, const SmallVector& b);

/// Max-norm of (m - identity).
double distance_from_identity(const SmallMatrix& m);

/// Eigenvalues of a symmetric matrix (ascending). Closed form for D=2,
/// trigonometric solution for D=3.
std::array<double, 3> symmetric_eigenvalues(const SmallMatrix& m);

}  // namespace madphys::numerics
