#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "madphys/classical/classical.hpp"
#include "madphys/harness/episode.hpp"
#include "madphys/numerics/rng.hpp"

namespace madphys::harness {

/// Quadratic through the last three (time, value-vector) samples, evaluated
/// at t. With two samples the extrapolation is linear, with one constant.
std::vector<double> const_accel_predict(std::span<const double> times, std::span<const std::vector<double>> values,
                                        double t);

/// Linear extrapolation through the last two samples (constant with one).
std::vector<double> linear_predict(std::span<const double> times, std::span<const std::vector<double>> values,
                                   double t);

/// Positions of every object observed at one time (NaN where unobserved).
struct TimedPositions {
  std::int64_t step = 0;
  std::vector<double> positions;
};

/// Root-mean-square difference between simulated and observed positions
/// over all observed components.
double trajectory_residual(const classical::ClassicalConfig& config, const classical::ParticleState& initial,
                           std::span<const TimedPositions> observations);

struct LawFit {
  classical::GravityKind kind = classical::GravityKind::InverseSquare;
  double residual = 0.0;
  std::vector<double> residuals;  // per candidate, in candidate order
};

/// Least-squares selection among gravity laws (default ripple shape for Ripple).
LawFit fit_gravity_law(const classical::ClassicalConfig& config, const classical::ParticleState& initial,
                       std::span<const TimedPositions> observations,
                       std::span<const classical::GravityKind> candidates = {});

struct KappaFit {
  double kappa = 0.0;
  double residual = 0.0;
};

/// Coarse grid over [0, kappa_max] then golden-section refinement.
KappaFit fit_kappa(const classical::ClassicalConfig& config, const classical::ParticleState& initial,
                   std::span<const TimedPositions> observations, double kappa_max = 30.0);

enum class BaselinePolicy { Random, Grid, ModelFit, ConstAccel };

const char* to_string(BaselinePolicy policy) noexcept;
/// Throws ConfigError on unknown names.
BaselinePolicy parse_baseline_policy(std::string_view name);

/// Scripted agent. Works in every environment; model_fit and const_accel
/// fall back to the grid schedule where their model does not apply.
class BaselineAgent : public Agent {
 public:
  BaselineAgent(BaselinePolicy policy, std::uint64_t seed);

  std::optional<std::string> respond(const nlohmann::json& envelope) override;
  void reset() override;

  BaselinePolicy policy() const noexcept { return policy_; }

 private:
  struct Sample {
    double time = 0.0;
    std::int64_t step = 0;
    int trial = 0;
    nlohmann::json observation;
  };

  void on_briefing(const nlohmann::json& payload);
  void on_observation(const nlohmann::json& payload);
  std::string next_action();
  std::string random_action();
  std::string scheduled_action();
  std::string answer(const nlohmann::json& query);
  std::vector<double> answer_classical(const nlohmann::json& query);
  std::vector<double> answer_fluid(const nlohmann::json& query);
  std::vector<double> answer_quantum(const nlohmann::json& query);
  double estimate_kappa();
  std::optional<classical::ParticleState> briefed_state() const;
  classical::ClassicalConfig briefed_config() const;
  std::vector<TimedPositions> classical_observations() const;

  BaselinePolicy policy_;
  std::uint64_t seed_;
  numerics::SeededRng rng_;
  EnvironmentKind kind_ = EnvironmentKind::Classical;
  nlohmann::json briefing_;
  nlohmann::json params_;
  double time_ = 0.0;
  double budget_ = 0.0;
  double dt_ = 0.001;
  double t_max_ = 1.0;
  int trial_ = 0;
  int actions_taken_ = 0;
  std::vector<Sample> samples_;
  std::optional<double> kappa_estimate_;
  std::optional<classical::GravityKind> fitted_law_;
};

std::unique_ptr<Agent> make_baseline(BaselinePolicy policy, std::uint64_t seed);

}  // namespace madphys::harness
