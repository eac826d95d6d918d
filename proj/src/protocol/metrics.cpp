#include "madphys/protocol/metrics.hpp"

#include <cmath>

#include "madphys/core/error.hpp"

namespace madphys::protocol {

double nrmse(std::span<const double> pred, std::span<const double> truth, double diag_length) {
  if (pred.size() != truth.size()) throw ArgumentError("nrmse: length mismatch");
  if (pred.empty()) throw ArgumentError("nrmse: empty vectors");
  if (!(diag_length > 0.0)) throw ArgumentError("nrmse: diag_length must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(pred.size())) / diag_length;
}

double l2_error(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw ArgumentError("l2_error: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double box_diagonal(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) throw ArgumentError("box_diagonal: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) sum += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return std::sqrt(sum);
}

}  // namespace madphys::protocol
