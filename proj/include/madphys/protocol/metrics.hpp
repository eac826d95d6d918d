#pragma once

#include <span>

namespace madphys::protocol {

/// Root-mean-square error over all components divided by diag_length.
/// Predictions are never clipped to the domain.
double nrmse(std::span<const double> pred, std::span<const double> truth, double diag_length);

/// Root of the summed squared differences (no 1/N).
double l2_error(std::span<const double> pred, std::span<const double> truth);

/// Diagonal length of an axis-aligned box.
double box_diagonal(std::span<const double> lo, std::span<const double> hi);

}  // namespace madphys::protocol
