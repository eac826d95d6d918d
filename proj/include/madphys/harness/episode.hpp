#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "madphys/core/error.hpp"
#include "madphys/harness/config.hpp"
#include "madphys/harness/environments.hpp"
#include "madphys/numerics/rng.hpp"
#include "madphys/protocol/clock.hpp"
#include "madphys/protocol/ledger.hpp"

namespace madphys::harness {

inline constexpr int kRecordSchemaVersion = 1;

enum class Phase { Measurement, Prediction, Done };

const char* to_string(Phase phase) noexcept;

/// One agent message and the envelope it produced.
struct TranscriptEntry {
  std::string phase;
  std::string agent;
  nlohmann::json response;
  double cost = 0.0;
  /// Observation time, or the clock when no observation was made.
  double time = 0.0;
  int trial = 0;
};

struct PredictionRecord {
  PredictionQuery query;
  std::optional<std::vector<double>> answer;
  std::vector<double> truth;
  /// Missing only for a forfeited parameter estimate.
  std::optional<double> error;
  bool forfeit = false;
};

struct ParameterEstimate {
  std::string symbol;
  double true_value = 0.0;
  std::optional<double> estimate;
  std::optional<double> abs_error;
};

struct EpisodeRecord {
  int schema_version = kRecordSchemaVersion;
  std::string episode_id;
  nlohmann::json config;
  /// Draw counters of the noise and query streams when the episode began.
  std::uint64_t noise_offset = 0;
  std::uint64_t query_offset = 0;
  nlohmann::json opening_summary;
  nlohmann::json briefing;
  std::vector<TranscriptEntry> transcript;
  std::vector<PredictionRecord> predictions;
  std::optional<double> score;
  std::string metric;
  std::optional<std::string> law_description;
  std::optional<ParameterEstimate> parameter;
  std::string status = "running";
  std::string abort_reason;
};

/// Observation-noise and query streams; shared across ICL episodes so they
/// keep advancing from one episode to the next.
struct EpisodeStreams {
  numerics::SeededRng noise;
  numerics::SeededRng query;

  explicit EpisodeStreams(std::uint64_t seed)
      : noise(seed, numerics::Stream::Noise), query(seed, numerics::Stream::Query) {}
};

/// Measurement -> prediction state machine for one episode. Every agent
/// message yields exactly one envelope
/// {"type": briefing|observation|error|prediction_query|result, "payload": ...}.
class Episode {
 public:
  explicit Episode(EpisodeConfig config, std::string episode_id = "episode-0",
                   std::shared_ptr<EpisodeStreams> streams = nullptr,
                   nlohmann::json opening_summary = nullptr);

  /// Briefing envelope; call once before handle().
  nlohmann::json start();
  /// Processes one raw agent message. After the result envelope, further
  /// messages get a wrong_phase error.
  nlohmann::json handle(std::string_view agent_message);
  /// Ends the episode early (transport failure); the record keeps what was
  /// collected so far.
  void abort(const std::string& reason);

  Phase phase() const noexcept { return phase_; }
  bool done() const noexcept { return phase_ == Phase::Done; }
  int trial() const noexcept { return trial_; }
  double remaining_budget() const noexcept { return ledger_.remaining(); }
  const protocol::Clock& clock() const noexcept { return clock_; }
  const EpisodeConfig& config() const noexcept { return config_; }
  const EpisodeEnvironment& environment() const noexcept { return *env_; }
  const EpisodeRecord& record() const noexcept { return record_; }

 private:
  /// `time` receives the observation time when one is made.
  nlohmann::json handle_measurement(std::string_view message, double& cost, double& time);
  nlohmann::json handle_prediction(std::string_view message);
  nlohmann::json protocol_failure(const ProtocolError& error);
  nlohmann::json measurement_status() const;
  bool measurement_exhausted() const;
  /// Ends the current trial; returns true when another trial begins.
  bool next_trial();
  nlohmann::json enter_prediction(nlohmann::json notice);
  nlohmann::json query_envelope(std::size_t index, nlohmann::json extra = nlohmann::json::object()) const;
  nlohmann::json finish_episode();
  void record_answer(std::size_t index, std::optional<std::vector<double>> values, bool forfeit);

  EpisodeConfig config_;
  std::unique_ptr<EpisodeEnvironment> env_;
  std::shared_ptr<EpisodeStreams> streams_;
  protocol::Clock clock_;
  protocol::BudgetLedger ledger_;
  Phase phase_ = Phase::Measurement;
  bool started_ = false;
  int trial_ = 0;
  int retries_ = 0;
  int skipped_turns_ = 0;
  std::vector<PredictionQuery> queries_;
  std::vector<std::vector<double>> truths_;
  std::size_t current_query_ = 0;
  EpisodeRecord record_;
};

/// Agent endpoint driven by run_episode.
class Agent {
 public:
  virtual ~Agent() = default;
  /// Reply to an envelope; std::nullopt signals a transport failure.
  virtual std::optional<std::string> respond(const nlohmann::json& envelope) = 0;
  /// Receives the result envelope.
  virtual void finish(const nlohmann::json& /*result*/) {}
  /// Clears context between ICL episodes.
  virtual void reset() {}
};

/// Drives one episode to completion (or abort) and returns its record.
EpisodeRecord run_episode(const EpisodeConfig& config, Agent& agent, const std::string& episode_id = "episode-0",
                          std::shared_ptr<EpisodeStreams> streams = nullptr,
                          const nlohmann::json& opening_summary = nullptr);

/// ICL: num_episodes episodes from identical initial conditions, with the
/// agent reset in between and handed a summary of the previous episodes.
/// Other variants run a single episode (quantum trials happen inside it).
/// Episode ids are `<id_prefix>-<index>`.
std::vector<EpisodeRecord> run_trials(const EpisodeConfig& config, Agent& agent,
                                      const std::string& id_prefix = "episode");

struct ParameterInferenceResult {
  EpisodeRecord record;
  double true_value = 0.0;
  std::optional<double> estimate;
  std::optional<double> abs_error;
};

/// Classical episode whose single query asks for kappa.
ParameterInferenceResult run_parameter_inference(const EpisodeConfig& config, Agent& agent);

/// Summary handed to the next ICL episode: observations, queries, answers
/// and errors of every previous episode, but no ground truth.
nlohmann::json icl_summary(const std::vector<EpisodeRecord>& previous);

/// Wire envelope.
nlohmann::json envelope(const char* type, nlohmann::json payload);

}  // namespace madphys::harness
