#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "madphys/protocol/fidelity.hpp"

namespace madphys::harness {

enum class EnvironmentKind { Classical, Fluid, Quantum };

const char* to_string(EnvironmentKind kind) noexcept;
/// Throws ConfigError on unknown names.
EnvironmentKind parse_environment_kind(std::string_view name);

struct ObjectSelection {
  std::size_t object_id = 0;
  protocol::Fidelity quality = protocol::Fidelity::High;
};

struct ClassicalRequest {
  std::vector<ObjectSelection> selection;
  double time_delta = 0.0;
};

struct PointSelection {
  double x = 0.0;
  double y = 0.0;
  protocol::Fidelity quality = protocol::Fidelity::High;
};

struct FluidRequest {
  std::vector<PointSelection> selection;
  double time_delta = 0.0;
};

struct QuantumRequest {
  int particle = 1;
  double time_delta = 0.0;
  protocol::Fidelity quality = protocol::Fidelity::High;
};

using MeasurementRequest = std::variant<ClassicalRequest, FluidRequest, QuantumRequest>;

/// `{"finish": true}` ends the measurement phase early.
struct FinishRequest {};

/// `{"next_trial": true}` abandons the current quantum trial.
struct NextTrialRequest {};

/// `{"predictions": [...], "law_description": "..."}`
struct PredictionAnswer {
  std::vector<double> values;
  std::optional<std::string> law_description;
};

using AgentAction = std::variant<MeasurementRequest, FinishRequest, NextTrialRequest, PredictionAnswer>;

/// Parses one agent message. Unknown fields are rejected and quality strings
/// are case-insensitive. Every failure is a ProtocolError with its own code:
/// parse, missing_field, unknown_field, invalid_type, empty_selection,
/// invalid_object, duplicate_object, invalid_coordinate, invalid_quality,
/// invalid_time_delta, invalid_particle, invalid_prediction.
AgentAction parse_action(std::string_view raw, EnvironmentKind kind);

/// Cost-model fidelities of a request, one per observed item.
std::vector<protocol::Fidelity> request_fidelities(const MeasurementRequest& request);
double request_time_delta(const MeasurementRequest& request);

}  // namespace madphys::harness
