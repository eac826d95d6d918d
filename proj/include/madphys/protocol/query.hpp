#pragma once

#include <cstdint>

#include "madphys/numerics/rng.hpp"

namespace madphys::protocol {

/// Uniform query time in (t_max, horizon_factor * t_max].
/// Throws ConfigError when horizon_factor <= 1 or t_max <= 0.
double sample_query(double t_max, double horizon_factor, numerics::SeededRng& rng);

/// Step index used to evaluate a query: nearest step, but always past the
/// measurement window.
std::int64_t query_step(double query_time, double dt, std::int64_t max_measurement_steps);

}  // namespace madphys::protocol
