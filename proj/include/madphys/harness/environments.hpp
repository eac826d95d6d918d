#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "madphys/classical/classical.hpp"
#include "madphys/fluid/fluid.hpp"
#include "madphys/harness/actions.hpp"
#include "madphys/harness/config.hpp"
#include "madphys/numerics/rng.hpp"
#include "madphys/quantum/quantum.hpp"

namespace madphys::harness {

/// One prediction query. `time` is NaN for parameter queries.
struct PredictionQuery {
  int index = 0;
  double time = 0.0;
  std::int64_t step = 0;
  nlohmann::json target;
  std::size_t arity = 0;
};

/// Domain side of an episode: state, observation, queries and scoring.
/// Budget, clock and phase bookkeeping live in Episode.
class EpisodeEnvironment {
 public:
  virtual ~EpisodeEnvironment() = default;

  virtual EnvironmentKind kind() const noexcept = 0;
  virtual double dt() const noexcept = 0;
  virtual double t_max() const noexcept = 0;
  /// Budget per measurement phase (per trial for quantum).
  virtual double budget() const noexcept = 0;
  virtual int num_trials() const noexcept { return 1; }
  virtual const char* metric_name() const noexcept = 0;

  /// {"text": ..., "parameters": {...}} plus, for classical, a free exact
  /// "initial_observation".
  virtual nlohmann::json briefing() const = 0;

  /// Domain checks on a parsed request (ids, particle). Throws ProtocolError.
  virtual void validate(const MeasurementRequest& request) const = 0;

  virtual std::int64_t step() const noexcept = 0;
  /// Advances the state; `step` is never below the current one.
  virtual void advance_to_step(std::int64_t step) = 0;
  /// Observation of the current state (quantum: collapses it).
  virtual nlohmann::json observe(const MeasurementRequest& request, numerics::SeededRng& noise) = 0;
  /// Quantum: restore the initial state for the next trial.
  virtual void reset_trial() {}

  virtual std::vector<PredictionQuery> make_queries(int count, double horizon_factor,
                                                    numerics::SeededRng& query_rng) const;
  /// Noiseless targets, evaluated on the undisturbed trajectory.
  virtual std::vector<std::vector<double>> truths(const std::vector<PredictionQuery>& queries) const = 0;
  virtual double score(std::span<const double> prediction, std::span<const double> truth) const = 0;

 protected:
  /// Domain-specific target payload and arity for one query.
  virtual void fill_target(PredictionQuery& query, numerics::SeededRng& query_rng) const = 0;
};

class ClassicalEnvironment final : public EpisodeEnvironment {
 public:
  /// `visual_size` > 0 replaces numeric observations with PNG renderings.
  ClassicalEnvironment(const classical::ClassicalConfig& config, const protocol::CostModel& costs,
                       std::uint64_t seed, int visual_size = 0, bool parameter_inference = false);

  EnvironmentKind kind() const noexcept override { return EnvironmentKind::Classical; }
  double dt() const noexcept override { return sim_.config().dt; }
  double t_max() const noexcept override { return sim_.config().t_max; }
  double budget() const noexcept override { return sim_.config().budget; }
  const char* metric_name() const noexcept override { return "nrmse"; }
  nlohmann::json briefing() const override;
  void validate(const MeasurementRequest& request) const override;
  std::int64_t step() const noexcept override { return sim_.clock().step_count(); }
  void advance_to_step(std::int64_t step) override { sim_.advance_to_step(step); }
  nlohmann::json observe(const MeasurementRequest& request, numerics::SeededRng& noise) override;
  std::vector<PredictionQuery> make_queries(int count, double horizon_factor,
                                            numerics::SeededRng& query_rng) const override;
  std::vector<std::vector<double>> truths(const std::vector<PredictionQuery>& queries) const override;
  double score(std::span<const double> prediction, std::span<const double> truth) const override;

  const classical::ClassicalSimulation& simulation() const noexcept { return sim_; }
  const classical::ParticleState& initial_state() const noexcept { return initial_; }

 protected:
  void fill_target(PredictionQuery& query, numerics::SeededRng& query_rng) const override;

 private:
  protocol::CostModel costs_;
  classical::ParticleState initial_;
  classical::ClassicalSimulation sim_;
  int visual_size_;
  bool parameter_inference_;
};

class FluidEnvironment final : public EpisodeEnvironment {
 public:
  FluidEnvironment(const fluid::FluidConfig& config, const protocol::CostModel& costs, std::uint64_t seed);

  EnvironmentKind kind() const noexcept override { return EnvironmentKind::Fluid; }
  double dt() const noexcept override { return solver_.config().dt; }
  double t_max() const noexcept override { return solver_.config().t_max; }
  double budget() const noexcept override { return solver_.config().budget; }
  const char* metric_name() const noexcept override { return "l2"; }
  nlohmann::json briefing() const override;
  void validate(const MeasurementRequest& request) const override;
  std::int64_t step() const noexcept override { return step_; }
  void advance_to_step(std::int64_t step) override;
  nlohmann::json observe(const MeasurementRequest& request, numerics::SeededRng& noise) override;
  std::vector<std::vector<double>> truths(const std::vector<PredictionQuery>& queries) const override;
  double score(std::span<const double> prediction, std::span<const double> truth) const override;

  const fluid::FluidSolver& solver() const noexcept { return solver_; }
  const fluid::VorticityField& field() const noexcept { return field_; }
  const fluid::ShearLayer& shear() const noexcept { return shear_; }

 protected:
  void fill_target(PredictionQuery& query, numerics::SeededRng& query_rng) const override;

 private:
  protocol::CostModel costs_;
  fluid::FluidSolver solver_;
  fluid::ShearLayer shear_;
  fluid::VorticityField field_;
  std::int64_t step_ = 0;
};

class QuantumEnvironment final : public EpisodeEnvironment {
 public:
  QuantumEnvironment(const quantum::QuantumConfig& config, const protocol::CostModel& costs, std::uint64_t seed);

  EnvironmentKind kind() const noexcept override { return EnvironmentKind::Quantum; }
  double dt() const noexcept override { return config_.dt; }
  double t_max() const noexcept override { return config_.t_max; }
  double budget() const noexcept override { return config_.budget_per_trial; }
  int num_trials() const noexcept override { return config_.num_trials; }
  const char* metric_name() const noexcept override { return "l2"; }
  nlohmann::json briefing() const override;
  void validate(const MeasurementRequest& request) const override;
  std::int64_t step() const noexcept override { return step_; }
  void advance_to_step(std::int64_t step) override;
  nlohmann::json observe(const MeasurementRequest& request, numerics::SeededRng& noise) override;
  void reset_trial() override;
  std::vector<std::vector<double>> truths(const std::vector<PredictionQuery>& queries) const override;
  double score(std::span<const double> prediction, std::span<const double> truth) const override;

  const quantum::QuantumConfig& config() const noexcept { return config_; }
  const std::array<quantum::PacketParams, 2>& packets() const noexcept { return packets_; }
  const quantum::JointWavefunction& initial_state() const noexcept { return initial_; }
  const quantum::JointWavefunction& state() const noexcept { return psi_; }

 protected:
  void fill_target(PredictionQuery& query, numerics::SeededRng& query_rng) const override;

 private:
  protocol::CostModel costs_;
  quantum::QuantumConfig config_;
  std::array<quantum::PacketParams, 2> packets_;
  quantum::JointWavefunction initial_;
  quantum::JointWavefunction psi_;
  quantum::Propagator propagator_;
  std::int64_t step_ = 0;
};

/// Environment for an episode config, seeded from config.seed.
std::unique_ptr<EpisodeEnvironment> make_environment(const EpisodeConfig& config);

}  // namespace madphys::harness
