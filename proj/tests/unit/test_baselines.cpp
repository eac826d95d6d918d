#include <gtest/gtest.h>

#include <cmath>

#include "madphys/core/error.hpp"
#include "madphys/harness/baselines.hpp"
#include "madphys/harness/presets.hpp"
#include "madphys/protocol/metrics.hpp"

using namespace madphys;
using namespace madphys::harness;

namespace {

std::vector<double> const_accel_position(double t) {
  return {1.0 + 0.5 * t - 0.2 * t * t, -3.0 + 0.1 * t + 0.35 * t * t, 4.0 - 1.0 * t, 2.0};
}

struct Trajectory {
  classical::ClassicalConfig config;
  classical::ParticleState initial;
  std::vector<TimedPositions> observations;
};

Trajectory noiseless_trajectory(classical::GravityKind kind, double kappa, std::uint64_t seed) {
  Trajectory out;
  out.config.gravity.kind = kind;
  out.config.kappa = kappa;
  out.config.t_max = 3.0;
  numerics::SeededRng rng(seed, numerics::Stream::Init);
  out.initial = classical::init_classical(out.config, rng);
  classical::ClassicalSimulation sim(out.config, out.initial);
  for (std::int64_t step : {250, 500, 1000, 1500, 2000, 3000}) {
    sim.advance_to_step(step);
    out.observations.push_back({step, classical::classical_truth(sim.state())});
  }
  return out;
}

}  // namespace

TEST(Extrapolation, ConstantAccelerationIsExact) {
  const std::vector<double> times{0.0, 1.3, 2.0, 2.5};
  std::vector<std::vector<double>> values;
  for (double t : times) values.push_back(const_accel_position(t));
  for (double t : {3.0, 7.5, 30.0}) {
    const auto predicted = const_accel_predict(times, values, t);
    const auto truth = const_accel_position(t);
    EXPECT_LT(protocol::nrmse(predicted, truth, std::sqrt(800.0)), 1e-6);
    for (std::size_t k = 0; k < truth.size(); ++k) EXPECT_NEAR(predicted[k], truth[k], 1e-9 * (1.0 + t * t));
  }
}

TEST(Extrapolation, FewerSamples) {
  const std::vector<double> times{1.0, 2.0};
  const std::vector<std::vector<double>> values{{1.0}, {3.0}};
  EXPECT_DOUBLE_EQ(const_accel_predict(times, values, 4.0)[0], 7.0);
  EXPECT_DOUBLE_EQ(linear_predict(times, values, 4.0)[0], 7.0);
  EXPECT_DOUBLE_EQ(linear_predict(std::span(times).first(1), std::span(values).first(1), 9.0)[0], 1.0);
}

TEST(ModelFit, RecoversTheGeneratingLaw) {
  using classical::GravityKind;
  for (GravityKind kind : {GravityKind::InverseSquare, GravityKind::InverseLinear}) {
    const Trajectory traj = noiseless_trajectory(kind, 0.0, 7);
    const LawFit fit = fit_gravity_law(traj.config, traj.initial, traj.observations);
    EXPECT_EQ(fit.kind, kind);
    EXPECT_LT(fit.residual, 1e-6);
    EXPECT_EQ(fit.residuals.size(), 3u);
  }
}

TEST(ModelFit, ResidualIsZeroForTheTrueModelOnly) {
  const Trajectory traj = noiseless_trajectory(classical::GravityKind::InverseLinear, 0.0, 8);
  EXPECT_EQ(trajectory_residual(traj.config, traj.initial, traj.observations), 0.0);
  classical::ClassicalConfig wrong = traj.config;
  wrong.gravity.kind = classical::GravityKind::InverseSquare;
  EXPECT_GT(trajectory_residual(wrong, traj.initial, traj.observations), 1e-4);
}

TEST(ModelFit, KappaEstimate) {
  const Trajectory traj = noiseless_trajectory(classical::GravityKind::InverseSquare, 0.0, 9);
  EXPECT_LT(fit_kappa(traj.config, traj.initial, traj.observations).kappa, 0.5);
  const Trajectory heavy = noiseless_trajectory(classical::GravityKind::InverseSquare, 10.0, 9);
  EXPECT_NEAR(fit_kappa(heavy.config, heavy.initial, heavy.observations).kappa, 10.0, 0.5);
}

TEST(BaselinePolicy, Names) {
  for (auto p : {BaselinePolicy::Random, BaselinePolicy::Grid, BaselinePolicy::ModelFit, BaselinePolicy::ConstAccel})
    EXPECT_EQ(parse_baseline_policy(to_string(p)), p);
  EXPECT_THROW(parse_baseline_policy("oracle"), ConfigError);
}

TEST(BaselineAgent, CompletesEveryDomainWithoutOverspending) {
  for (auto kind : {EnvironmentKind::Classical, EnvironmentKind::Fluid, EnvironmentKind::Quantum}) {
    for (auto policy : {BaselinePolicy::Random, BaselinePolicy::Grid, BaselinePolicy::ConstAccel}) {
      const EpisodeConfig config = make_preset(kind, "normal", PresetScale::Quick, 1);
      auto agent = make_baseline(policy, 2);
      const EpisodeRecord record = run_episode(config, *agent);
      EXPECT_EQ(record.status, "completed") << to_string(kind) << "/" << to_string(policy);
      ASSERT_TRUE(record.score.has_value());
      EXPECT_TRUE(std::isfinite(*record.score));
      for (const auto& t : record.transcript) {
        if (t.response.at("type") == "error") {
          EXPECT_NE(t.response.at("payload").at("code"), "insufficient_budget");
        }
      }
    }
  }
}

TEST(BaselineAgent, ModelFitBeatsRandomOnClassical) {
  const EpisodeConfig config = make_preset(EnvironmentKind::Classical, "inverse_linear", PresetScale::Quick, 4);
  auto fit = make_baseline(BaselinePolicy::ModelFit, 1);
  auto random = make_baseline(BaselinePolicy::Random, 1);
  const EpisodeRecord a = run_episode(config, *fit);
  const EpisodeRecord b = run_episode(config, *random);
  EXPECT_LT(*a.score, 1e-3);
  EXPECT_LT(*a.score, *b.score);
  ASSERT_TRUE(a.law_description.has_value());
  EXPECT_NE(a.law_description->find("inverse_linear"), std::string::npos) << *a.law_description;
}

TEST(BaselineAgent, ParameterInferenceEstimate) {
  EpisodeConfig config = make_preset(EnvironmentKind::Classical, "kappa10", PresetScale::Quick, 4);
  config.variant.kind = VariantKind::ParameterInference;
  auto agent = make_baseline(BaselinePolicy::ModelFit, 1);
  const ParameterInferenceResult result = run_parameter_inference(config, *agent);
  ASSERT_TRUE(result.abs_error.has_value());
  EXPECT_LT(*result.abs_error, 2.0);
}
