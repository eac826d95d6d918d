#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "madphys/numerics/rng.hpp"

namespace madphys::protocol {

enum class Fidelity { Low = 0, Medium = 1, High = 2 };

inline constexpr std::array<Fidelity, 3> kAllFidelities{Fidelity::Low, Fidelity::Medium,
                                                        Fidelity::High};

/// Case-insensitive: "high", "HIGH", "High" all parse.
std::optional<Fidelity> parse_fidelity(std::string_view text);
/// Lower-case name.
const char* to_string(Fidelity f) noexcept;

/// Fidelity -> cost and fidelity -> observation-noise standard deviation.
struct CostModel {
  std::array<double, 3> cost{2.0, 5.0, 10.0};
  std::array<double, 3> noise_sigma{0.1, 0.01, 0.001};

  double cost_of(Fidelity f) const noexcept { return cost[static_cast<std::size_t>(f)]; }
  double sigma(Fidelity f) const noexcept { return noise_sigma[static_cast<std::size_t>(f)]; }
  double min_cost() const noexcept;
  /// Throws ConfigError unless cost strictly increases and noise strictly
  /// decreases with fidelity.
  void validate() const;
};

/// Sum of per-item costs. Throws ProtocolError(EmptySelection) on an empty list.
double cost_of(std::span<const Fidelity> selection, const CostModel& model);

/// Adds independent N(0, sigma(fidelity)^2) noise to each value.
std::vector<double> apply_observation_noise(std::span<const double> values,
                                            std::span<const Fidelity> fidelities,
                                            const CostModel& model, numerics::SeededRng& rng);

}  // namespace madphys::protocol
