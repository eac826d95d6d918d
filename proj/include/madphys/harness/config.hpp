#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "madphys/classical/classical.hpp"
#include "madphys/fluid/fluid.hpp"
#include "madphys/harness/actions.hpp"
#include "madphys/protocol/fidelity.hpp"
#include "madphys/quantum/quantum.hpp"

namespace madphys::harness {

enum class VariantKind { Standard, Visual, Icl, ParameterInference };

const char* to_string(VariantKind kind) noexcept;

struct Variant {
  VariantKind kind = VariantKind::Standard;
  /// Visual: side length of the square PNG.
  int image_size = 512;
  /// ICL: number of consecutive episodes.
  int num_episodes = 1;
  /// Parameter inference: the hidden scalar (only "kappa" is supported).
  std::string symbol = "kappa";
};

struct EpisodeConfig {
  EnvironmentKind environment = EnvironmentKind::Classical;
  std::uint64_t seed = 0;
  int num_queries = 5;
  double horizon_factor = 1.2;
  Variant variant;
  /// Malformed or rejected messages tolerated per turn before it is skipped.
  int max_retries = 3;
  /// Consecutive skipped turns that end the current phase.
  int max_skipped_turns = 3;
  /// Test mode: prediction queries carry the true answer.
  bool disclose_truth = false;
  protocol::CostModel cost_model;
  classical::ClassicalConfig classical;
  fluid::FluidConfig fluid;
  quantum::QuantumConfig quantum;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// JSON form. Parsing rejects unknown keys and fills absent keys with defaults.
nlohmann::json to_json(const EpisodeConfig& config);
EpisodeConfig episode_config_from_json(const nlohmann::json& value);
EpisodeConfig load_episode_config(const std::string& path);

}  // namespace madphys::harness
