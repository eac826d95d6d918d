#pragma once

#include <cstdint>

namespace madphys::protocol {

/// Simulation clock; time is always step_count * dt.
class Clock {
 public:
  Clock(double dt, double t_max, std::int64_t step_count = 0);

  std::int64_t step_count() const noexcept { return step_count_; }
  double dt() const noexcept { return dt_; }
  double t_max() const noexcept { return t_max_; }
  double time() const noexcept { return static_cast<double>(step_count_) * dt_; }
  /// Largest step index inside the measurement window.
  std::int64_t max_steps() const noexcept { return max_steps_; }

  /// Number of steps a relative delay maps to: round to nearest, minimum 1.
  /// Throws ProtocolError(InvalidTimeDelta) when delta <= 0 or non-finite.
  std::int64_t steps_for(double time_delta) const;

  /// Clock after `time_delta`; throws TimeLimitExceeded past t_max.
  Clock advanced(double time_delta) const;

  /// Clock moved to an absolute step index without the t_max ceiling
  /// (prediction-phase evolution).
  Clock at_step(std::int64_t step) const;

 private:
  double dt_;
  double t_max_;
  std::int64_t step_count_;
  std::int64_t max_steps_;
};

}  // namespace madphys::protocol
