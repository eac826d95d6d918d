#include "madphys/protocol/query.hpp"

#include <algorithm>
#include <cmath>

#include "madphys/core/error.hpp"

namespace madphys::protocol {

double sample_query(double t_max, double horizon_factor, numerics::SeededRng& rng) {
  if (!(horizon_factor > 1.0) || !std::isfinite(horizon_factor))
    throw ConfigError("sample_query: horizon_factor must be > 1");
  if (!(t_max > 0.0)) throw ConfigError("sample_query: t_max must be positive");
  const double span = (horizon_factor - 1.0) * t_max;
  // 1 - u lies in (0, 1], so the draw lies in (t_max, horizon_factor * t_max].
  const double t = t_max + (1.0 - rng.uniform01()) * span;
  return t > t_max ? t : std::nextafter(t_max, 2.0 * t_max + 1.0);
}

std::int64_t query_step(double query_time, double dt, std::int64_t max_measurement_steps) {
  return std::max<std::int64_t>(std::llround(query_time / dt), max_measurement_steps + 1);
}

}  // namespace madphys::protocol
