#pragma once

#include <cstddef>
#include <vector>

namespace madphys::numerics {

/// Real samples on a periodic nx-by-ny grid covering [0, length_x) x [0, length_y).
/// Node (i, j) sits at (i * hx, j * hy) and is stored at values[i * ny + j].
struct RealGrid2D {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double length_x = 1.0;
  double length_y = 1.0;
  std::vector<double> values;

  RealGrid2D() = default;
  RealGrid2D(std::size_t nx, std::size_t ny, double length_x, double length_y);

  double& at(std::size_t i, std::size_t j) { return values[i * ny + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * ny + j]; }
  double hx() const noexcept { return length_x / static_cast<double>(nx); }
  double hy() const noexcept { return length_y / static_cast<double>(ny); }
};

/// Bilinear interpolation with periodic wrap; throws ArgumentError on
/// non-finite coordinates.
double bilinear_interpolate(const RealGrid2D& field, double x, double y);

}  // namespace madphys::numerics
