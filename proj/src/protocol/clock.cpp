#include "madphys/protocol/clock.hpp"

#include <cmath>

#include "madphys/core/error.hpp"

namespace madphys::protocol {

Clock::Clock(double dt, double t_max, std::int64_t step_count)
    : dt_(dt), t_max_(t_max), step_count_(step_count) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("Clock: dt must be positive");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ConfigError("Clock: t_max must be >= 0");
  if (step_count < 0) throw ConfigError("Clock: negative step count");
  max_steps_ = static_cast<std::int64_t>(std::floor(t_max / dt + 1e-9));
}

std::int64_t Clock::steps_for(double time_delta) const {
  if (!std::isfinite(time_delta) || !(time_delta > 0.0))
    throw ProtocolError(ErrorCode::InvalidTimeDelta, "time_delta must be a positive number");
  const double ratio = time_delta / dt_;
  if (ratio > 1e15) throw TimeLimitExceeded(time() + time_delta, t_max_);
  return std::max<std::int64_t>(1, std::llround(ratio));
}

Clock Clock::advanced(double time_delta) const {
  const std::int64_t target = step_count_ + steps_for(time_delta);
  if (target > max_steps_) throw TimeLimitExceeded(static_cast<double>(target) * dt_, t_max_);
  return Clock(dt_, t_max_, target);
}

Clock Clock::at_step(std::int64_t step) const { return Clock(dt_, t_max_, step); }

}  // namespace madphys::protocol
