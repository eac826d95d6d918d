#include <gtest/gtest.h>

#include "madphys/core/error.hpp"
#include "madphys/harness/actions.hpp"
#include "madphys/protocol/fidelity.hpp"

using namespace madphys;
using namespace madphys::harness;
using protocol::Fidelity;

namespace {

ErrorCode code_of(std::string_view raw, EnvironmentKind kind) {
  try {
    parse_action(raw, kind);
  } catch (const ProtocolError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << raw;
  return ErrorCode::Parse;
}

constexpr auto C = EnvironmentKind::Classical;
constexpr auto F = EnvironmentKind::Fluid;
constexpr auto Q = EnvironmentKind::Quantum;

}  // namespace

TEST(ParseAction, ClassicalRequest) {
  const auto action = parse_action(R"({"selection":[{"object_id":0,"quality":"high"}],"time_delta":0.1})", C);
  const auto& request = std::get<ClassicalRequest>(std::get<MeasurementRequest>(action));
  ASSERT_EQ(request.selection.size(), 1u);
  EXPECT_EQ(request.selection[0].object_id, 0u);
  EXPECT_EQ(request.selection[0].quality, Fidelity::High);
  EXPECT_DOUBLE_EQ(request.time_delta, 0.1);
  const protocol::CostModel model;
  EXPECT_DOUBLE_EQ(protocol::cost_of(request_fidelities(std::get<MeasurementRequest>(action)), model), 10.0);
}

TEST(ParseAction, MultiLineClassicalMessage) {
  const auto action = parse_action(R"({
  "selection": [
    {"object_id": 0, "quality": "high"},
    {"object_id": 2, "quality": "low"}
  ],
  "time_delta": 2
})",
                                   C);
  const auto& request = std::get<ClassicalRequest>(std::get<MeasurementRequest>(action));
  ASSERT_EQ(request.selection.size(), 2u);
  EXPECT_EQ(request.selection[1].object_id, 2u);
  EXPECT_EQ(request.selection[1].quality, Fidelity::Low);
  EXPECT_DOUBLE_EQ(request_time_delta(std::get<MeasurementRequest>(action)), 2.0);
}

TEST(ParseAction, FluidRequest) {
  const auto action = parse_action(
      R"({"selection":[{"x":0.1,"y":0.2,"quality":"high"},{"x":0.3,"y":0.4,"quality":"low"}],"time_delta":0.1})", F);
  const auto& request = std::get<FluidRequest>(std::get<MeasurementRequest>(action));
  ASSERT_EQ(request.selection.size(), 2u);
  EXPECT_DOUBLE_EQ(request.selection[1].x, 0.3);
  EXPECT_DOUBLE_EQ(request.selection[1].y, 0.4);
  EXPECT_EQ(request_fidelities(std::get<MeasurementRequest>(action)),
            (std::vector<Fidelity>{Fidelity::High, Fidelity::Low}));
}

TEST(ParseAction, QuantumRequestIsCaseInsensitive) {
  for (const char* quality : {"HIGH", "high", "High", "hIgH"}) {
    const std::string raw = std::string(R"({"particle":1,"time_delta":0.1,"quality":")") + quality + "\"}";
    const auto& request = std::get<QuantumRequest>(std::get<MeasurementRequest>(parse_action(raw, Q)));
    EXPECT_EQ(request.particle, 1);
    EXPECT_EQ(request.quality, Fidelity::High);
  }
  const auto& medium = std::get<QuantumRequest>(
      std::get<MeasurementRequest>(parse_action(R"({"particle":2,"time_delta":1,"quality":"MEDIUM"})", Q)));
  EXPECT_EQ(medium.particle, 2);
  EXPECT_EQ(medium.quality, Fidelity::Medium);
}

TEST(ParseAction, ControlMessages) {
  EXPECT_TRUE(std::holds_alternative<FinishRequest>(parse_action(R"({"finish":true})", C)));
  EXPECT_TRUE(std::holds_alternative<NextTrialRequest>(parse_action(R"({"next_trial":true})", Q)));
  EXPECT_EQ(code_of(R"({"finish":false})", C), ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"finish":true,"x":1})", C), ErrorCode::UnknownField);
}

TEST(ParseAction, Predictions) {
  const auto answer = std::get<PredictionAnswer>(parse_action(R"({"predictions":[1.5,-2,3e-3]})", C));
  EXPECT_EQ(answer.values, (std::vector<double>{1.5, -2.0, 3e-3}));
  EXPECT_FALSE(answer.law_description.has_value());
  const auto described =
      std::get<PredictionAnswer>(parse_action(R"({"predictions":[],"law_description":"F = G m1 m2 / r"})", F));
  EXPECT_EQ(described.law_description.value(), "F = G m1 m2 / r");
  EXPECT_EQ(code_of(R"({"predictions":[1,"a"]})", C), ErrorCode::InvalidPrediction);
  EXPECT_EQ(code_of(R"({"predictions":[NaN]})", C), ErrorCode::InvalidPrediction);
  EXPECT_EQ(code_of(R"({"predictions":3})", C), ErrorCode::InvalidPrediction);
  EXPECT_EQ(code_of(R"({"predictions":[1],"law_description":4})", C), ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"predictions":[1],"extra":4})", C), ErrorCode::UnknownField);
}

TEST(ParseAction, ErrorCodes) {
  EXPECT_EQ(code_of(R"({"selection":[],"time_delta":1})", C), ErrorCode::EmptySelection);
  EXPECT_EQ(code_of(R"({"selection":[],"time_delta":1})", F), ErrorCode::EmptySelection);
  EXPECT_EQ(code_of("not json", C), ErrorCode::Parse);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"high"}])", C), ErrorCode::Parse);
  EXPECT_EQ(code_of("[1,2]", C), ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"high"}]})", C), ErrorCode::MissingField);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0}],"time_delta":1})", C), ErrorCode::MissingField);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"high"}],"time_delta":1,"x":0})", C),
            ErrorCode::UnknownField);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"high","mass":1}],"time_delta":1})", C),
            ErrorCode::UnknownField);
  EXPECT_EQ(code_of(R"({"selection":{"object_id":0},"time_delta":1})", C), ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":"0","quality":"high"}],"time_delta":1})", C),
            ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0.5,"quality":"high"}],"time_delta":1})", C),
            ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":-1,"quality":"high"}],"time_delta":1})", C),
            ErrorCode::InvalidObject);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":1,"quality":"high"},{"object_id":1,"quality":"low"}],"time_delta":1})",
                    C),
            ErrorCode::DuplicateObject);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"best"}],"time_delta":1})", C),
            ErrorCode::InvalidQuality);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":3}],"time_delta":1})", C), ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"high"}],"time_delta":0})", C),
            ErrorCode::InvalidTimeDelta);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"high"}],"time_delta":-1})", C),
            ErrorCode::InvalidTimeDelta);
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"high"}],"time_delta":Infinity})", C),
            ErrorCode::InvalidTimeDelta);
  EXPECT_EQ(code_of(R"({"selection":[{"x":NaN,"y":0,"quality":"high"}],"time_delta":1})", F),
            ErrorCode::InvalidCoordinate);
  EXPECT_EQ(code_of(R"({"selection":[{"x":"a","y":0,"quality":"high"}],"time_delta":1})", F), ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"particle":3,"time_delta":1,"quality":"HIGH"})", Q), ErrorCode::InvalidParticle);
  EXPECT_EQ(code_of(R"({"particle":"1","time_delta":1,"quality":"HIGH"})", Q), ErrorCode::InvalidType);
  EXPECT_EQ(code_of(R"({"particle":1,"time_delta":1})", Q), ErrorCode::MissingField);
  // A classical message sent to the quantum environment.
  EXPECT_EQ(code_of(R"({"selection":[{"object_id":0,"quality":"high"}],"time_delta":1})", Q),
            ErrorCode::UnknownField);
}

TEST(ParseAction, NonFiniteInsideStringsIsLiteral) {
  const auto answer =
      std::get<PredictionAnswer>(parse_action(R"({"predictions":[1],"law_description":"NaN Infinity"})", C));
  EXPECT_EQ(answer.law_description.value(), "NaN Infinity");
}

TEST(EnvironmentKind, Names) {
  for (auto kind : {C, F, Q}) EXPECT_EQ(parse_environment_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_environment_kind("relativistic"), ConfigError);
}

TEST(ErrorCodes, WireNames) {
  EXPECT_STREQ(to_string(ErrorCode::InsufficientBudget), "insufficient_budget");
  EXPECT_STREQ(to_string(ErrorCode::EmptySelection), "empty_selection");
  EXPECT_STREQ(to_string(ErrorCode::TrialLimit), "trial_limit");
}
