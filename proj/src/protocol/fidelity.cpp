#include "madphys/protocol/fidelity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "madphys/core/error.hpp"

namespace madphys::protocol {

std::optional<Fidelity> parse_fidelity(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "low") return Fidelity::Low;
  if (lower == "medium") return Fidelity::Medium;
  if (lower == "high") return Fidelity::High;
  return std::nullopt;
}

const char* to_string(Fidelity f) noexcept {
  switch (f) {
    case Fidelity::Low: return "low";
    case Fidelity::Medium: return "medium";
    case Fidelity::High: return "high";
  }
  return "?";
}

double CostModel::min_cost() const noexcept { return *std::min_element(cost.begin(), cost.end()); }

void CostModel::validate() const {
  if (!(cost[0] > 0.0 && cost[1] > cost[0] && cost[2] > cost[1]))
    throw ConfigError("CostModel: cost must be positive and strictly increasing with fidelity");
  if (!(noise_sigma[0] >= 0.0 && noise_sigma[1] >= 0.0 && noise_sigma[2] >= 0.0))
    throw ConfigError("CostModel: noise sigma must be non-negative");
  const bool all_zero = noise_sigma[0] == 0.0 && noise_sigma[1] == 0.0 && noise_sigma[2] == 0.0;
  if (!all_zero && !(noise_sigma[0] > noise_sigma[1] && noise_sigma[1] > noise_sigma[2]))
    throw ConfigError("CostModel: noise must strictly decrease with fidelity");
}

double cost_of(std::span<const Fidelity> selection, const CostModel& model) {
  if (selection.empty()) throw ProtocolError(ErrorCode::EmptySelection, "empty selection");
  double total = 0.0;
  for (auto f : selection) total += model.cost_of(f);
  return total;
}

std::vector<double> apply_observation_noise(std::span<const double> values,
                                            std::span<const Fidelity> fidelities,
                                            const CostModel& model, numerics::SeededRng& rng) {
  if (values.size() != fidelities.size())
    throw ArgumentError("apply_observation_noise: one fidelity per value required");
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw ArgumentError("apply_observation_noise: non-finite value");
    out.push_back(numerics::sample_gaussian(rng, values[i], model.sigma(fidelities[i])));
  }
  return out;
}

}  // namespace madphys::protocol
