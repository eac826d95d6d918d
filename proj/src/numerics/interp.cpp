#include "madphys/numerics/interp.hpp"

#include <cmath>

#include "madphys/core/error.hpp"

namespace madphys::numerics {

RealGrid2D::RealGrid2D(std::size_t nx_, std::size_t ny_, double lx, double ly)
    : nx(nx_), ny(ny_), length_x(lx), length_y(ly), values(nx_ * ny_, 0.0) {}

namespace {

// Cell index and fractional offset for a periodic coordinate.
std::pair<std::size_t, double> locate(double coord, double length, std::size_t n) {
  double wrapped = std::fmod(coord, length);
  if (wrapped < 0.0) wrapped += length;
  const double s = wrapped / length * static_cast<double>(n);
  double cell = std::floor(s);
  double frac = s - cell;
  auto i = static_cast<std::size_t>(cell);
  if (i >= n) {  // wrapped == length after rounding
    i = 0;
    frac = 0.0;
  }
  return {i, frac};
}

}  // namespace

double bilinear_interpolate(const RealGrid2D& field, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw ArgumentError("bilinear_interpolate: non-finite coordinate");
  if (field.nx == 0 || field.ny == 0) throw ArgumentError("bilinear_interpolate: empty grid");
  const auto [i0, fx] = locate(x, field.length_x, field.nx);
  const auto [j0, fy] = locate(y, field.length_y, field.ny);
  const std::size_t i1 = (i0 + 1) % field.nx;
  const std::size_t j1 = (j0 + 1) % field.ny;
  return (1.0 - fx) * (1.0 - fy) * field.at(i0, j0) + fx * (1.0 - fy) * field.at(i1, j0) +
         (1.0 - fx) * fy * field.at(i0, j1) + fx * fy * field.at(i1, j1);
}

}  // namespace madphys::numerics
