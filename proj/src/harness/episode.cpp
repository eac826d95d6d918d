#include "madphys/harness/episode.hpp"

#include <cmath>
#include <numeric>

#include "madphys/core/error.hpp"
#include "madphys/protocol/fidelity.hpp"
#include "madphys/protocol/format.hpp"

namespace madphys::harness {

using nlohmann::json;

namespace {

std::string describe_request(const MeasurementRequest& request) {
  std::string out;
  for (auto f : request_fidelities(request)) {
    if (!out.empty()) out += ",";
    out += protocol::to_string(f);
  }
  return out;
}

json query_time_json(const PredictionQuery& q) { return std::isnan(q.time) ? json(nullptr) : json(q.time); }

std::string answer_format(const PredictionQuery& q) {
  const std::string kind = q.target.at("kind").get<std::string>();
  if (kind == "positions")
    return "{\"predictions\": [x0, y0, ...]} with " + std::to_string(q.arity) +
           " numbers: every coordinate of every object in index order";
  if (kind == "vorticity")
    return "{\"predictions\": [w0, w1, ...]} with " + std::to_string(q.arity) + " vorticity values, one per point";
  if (kind == "region_probability") return "{\"predictions\": [p]} with the probability p";
  return "{\"predictions\": [value]} with your estimate";
}

}  // namespace

const char* to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Measurement: return "measurement";
    case Phase::Prediction: return "prediction";
    case Phase::Done: return "done";
  }
  return "unknown";
}

json envelope(const char* type, json payload) { return json{{"type", type}, {"payload", std::move(payload)}}; }

Episode::Episode(EpisodeConfig config, std::string episode_id, std::shared_ptr<EpisodeStreams> streams,
                 json opening_summary)
    : config_(std::move(config)),
      env_(make_environment(config_)),
      streams_(streams ? std::move(streams) : std::make_shared<EpisodeStreams>(config_.seed)),
      clock_(env_->dt(), env_->t_max()),
      ledger_(env_->budget()) {
  record_.episode_id = std::move(episode_id);
  record_.config = to_json(config_);
  record_.noise_offset = streams_->noise.draws();
  record_.query_offset = streams_->query.draws();
  record_.opening_summary = std::move(opening_summary);
  record_.metric = config_.variant.kind == VariantKind::ParameterInference ? "abs_error" : env_->metric_name();
}

json Episode::start() {
  if (started_) throw Error("Episode::start called twice");
  started_ = true;
  json payload = env_->briefing();
  payload["episode_id"] = record_.episode_id;
  payload["environment"] = to_string(config_.environment);
  payload["variant"] = to_string(config_.variant.kind);
  payload["num_queries"] = config_.variant.kind == VariantKind::ParameterInference ? 1 : config_.num_queries;
  payload["budget_remaining"] = ledger_.remaining();
  payload["budget_line"] = protocol::budget_line(ledger_.remaining());
  if (env_->num_trials() > 1) {
    payload["trial"] = trial_;
    payload["num_trials"] = env_->num_trials();
  }
  if (!record_.opening_summary.is_null()) payload["previous_episodes"] = record_.opening_summary;
  record_.briefing = envelope("briefing", std::move(payload));
  record_.status = "running";
  return record_.briefing;
}

json Episode::handle(std::string_view agent_message) {
  if (!started_) throw Error("Episode::handle called before start");
  TranscriptEntry entry;
  entry.phase = to_string(phase_);
  entry.agent = std::string(agent_message);
  entry.trial = trial_;
  json response;
  double cost = 0.0;
  double time = clock_.time();
  switch (phase_) {
    case Phase::Measurement: response = handle_measurement(agent_message, cost, time); break;
    case Phase::Prediction: response = handle_prediction(agent_message); break;
    case Phase::Done:
      response = envelope("error", {{"code", to_string(ErrorCode::WrongPhase)}, {"message", "The episode is over."}});
      break;
  }
  entry.response = response;
  entry.cost = cost;
  entry.time = time;
  record_.transcript.push_back(std::move(entry));
  return response;
}

void Episode::abort(const std::string& reason) {
  phase_ = Phase::Done;
  record_.status = "aborted";
  record_.abort_reason = reason;
}

bool Episode::measurement_exhausted() const {
  return ledger_.remaining() < config_.cost_model.min_cost() || clock_.step_count() >= clock_.max_steps();
}

json Episode::measurement_status() const {
  json status{{"time", clock_.time()},
              {"budget_remaining", ledger_.remaining()},
              {"budget_line", protocol::budget_line(ledger_.remaining())}};
  if (env_->num_trials() > 1) status["trial"] = trial_;
  return status;
}

bool Episode::next_trial() {
  if (trial_ + 1 >= env_->num_trials()) return false;
  ++trial_;
  env_->reset_trial();
  clock_ = protocol::Clock(env_->dt(), env_->t_max());
  ledger_ = protocol::BudgetLedger(env_->budget());
  return true;
}

json Episode::handle_measurement(std::string_view message, double& cost, double& time) {
  if (measurement_exhausted()) return enter_prediction({{"reason", "no_affordable_observation"}});
  try {
    const AgentAction action = parse_action(message, config_.environment);
    if (std::holds_alternative<PredictionAnswer>(action))
      throw ProtocolError(ErrorCode::WrongPhase, "Predictions are accepted only after the measurement phase.");
    if (std::holds_alternative<FinishRequest>(action)) return enter_prediction({{"reason", "finished"}});
    if (std::holds_alternative<NextTrialRequest>(action)) {
      const int ended = trial_;
      if (!next_trial()) throw ProtocolError(ErrorCode::TrialLimit, "No further trials are available.");
      retries_ = skipped_turns_ = 0;
      json payload = measurement_status();
      payload["observation"] = nullptr;
      payload["trial_ended"] = {{"trial", ended}, {"reason", "requested"}, {"next_trial", trial_}};
      return envelope("observation", std::move(payload));
    }
    const auto& request = std::get<MeasurementRequest>(action);
    env_->validate(request);
    const auto fidelities = request_fidelities(request);
    const double price = protocol::cost_of(fidelities, config_.cost_model);
    if (!ledger_.can_afford(price)) throw InsufficientBudget(price, ledger_.remaining());
    const protocol::Clock next = clock_.advanced(request_time_delta(request));
    ledger_.charge(price, next.time(), describe_request(request));
    clock_ = next;
    env_->advance_to_step(clock_.step_count());
    json observation = env_->observe(request, streams_->noise);
    cost = price;
    time = clock_.time();
    retries_ = skipped_turns_ = 0;

    json payload = measurement_status();
    payload["step"] = clock_.step_count();
    payload["cost"] = price;
    payload["observation"] = observation;
    std::string text = "Observation at time " + protocol::format_fixed(clock_.time(), 5) + ":\n";
    text += observation.contains("image_png_base64") ? "(image attached)" : observation.dump();
    text += "\n" + protocol::budget_line(ledger_.remaining());
    payload["text"] = text;

    if (measurement_exhausted()) {
      const std::string reason = ledger_.remaining() < config_.cost_model.min_cost() ? "budget_exhausted" : "time_exhausted";
      const int ended = trial_;
      if (next_trial()) {
        payload["trial_ended"] = {{"trial", ended}, {"reason", reason}, {"next_trial", trial_},
                                  {"budget_remaining", ledger_.remaining()}};
        return envelope("observation", std::move(payload));
      }
      return enter_prediction({{"reason", reason}, {"final_observation", payload}});
    }
    return envelope("observation", std::move(payload));
  } catch (const TimeLimitExceeded& e) {
    json error{{"code", to_string(e.code())}, {"message", e.what()}};
    const int ended = trial_;
    if (next_trial()) {
      retries_ = skipped_turns_ = 0;
      json payload = measurement_status();
      payload.update(error);
      payload["trial_ended"] = {{"trial", ended}, {"reason", "time_limit"}, {"next_trial", trial_}};
      return envelope("error", std::move(payload));
    }
    return enter_prediction({{"reason", "time_limit"}, {"error", error}});
  } catch (const ProtocolError& e) {
    return protocol_failure(e);
  }
}

json Episode::protocol_failure(const ProtocolError& error) {
  json payload{{"code", to_string(error.code())}, {"message", error.what()}};
  if (const auto* budget = dynamic_cast<const InsufficientBudget*>(&error)) payload["requested_cost"] = budget->requested();
  if (phase_ == Phase::Measurement) payload.update(measurement_status());
  ++retries_;
  if (retries_ <= config_.max_retries) {
    payload["retries_left"] = config_.max_retries - retries_;
    return envelope("error", std::move(payload));
  }
  retries_ = 0;
  payload["turn_skipped"] = true;
  ++skipped_turns_;
  if (skipped_turns_ >= config_.max_skipped_turns) return enter_prediction({{"reason", "skipped_turns"}, {"error", payload}});
  return envelope("error", std::move(payload));
}

json Episode::enter_prediction(json notice) {
  phase_ = Phase::Prediction;
  retries_ = skipped_turns_ = 0;
  const int count = config_.variant.kind == VariantKind::ParameterInference ? 1 : config_.num_queries;
  queries_ = env_->make_queries(count, config_.horizon_factor, streams_->query);
  truths_ = env_->truths(queries_);
  record_.predictions.clear();
  for (std::size_t i = 0; i < queries_.size(); ++i) record_.predictions.push_back({queries_[i], std::nullopt, truths_[i], std::nullopt, false});
  current_query_ = 0;
  return query_envelope(0, {{"notice", std::move(notice)}});
}

json Episode::query_envelope(std::size_t index, json extra) const {
  const PredictionQuery& q = queries_[index];
  json payload{{"index", q.index},
               {"num_queries", queries_.size()},
               {"query_time", query_time_json(q)},
               {"target", q.target},
               {"arity", q.arity},
               {"answer_format", answer_format(q)}};
  if (config_.disclose_truth) payload["truth"] = truths_[index];
  payload.update(extra);
  return envelope("prediction_query", std::move(payload));
}

void Episode::record_answer(std::size_t index, std::optional<std::vector<double>> values, bool forfeit) {
  PredictionRecord& rec = record_.predictions[index];
  rec.forfeit = forfeit;
  rec.answer = values;
  const bool parameter = config_.variant.kind == VariantKind::ParameterInference;
  if (forfeit && parameter) {
    rec.error = std::nullopt;
    return;
  }
  const std::vector<double> prediction = values ? *values : std::vector<double>(queries_[index].arity, 0.0);
  rec.error = env_->score(prediction, truths_[index]);
}

json Episode::handle_prediction(std::string_view message) {
  bool forfeited = false;
  try {
    const AgentAction action = parse_action(message, config_.environment);
    const auto* answer = std::get_if<PredictionAnswer>(&action);
    if (!answer)
      throw ProtocolError(ErrorCode::WrongPhase,
                          "The measurement phase is over; answer with {\"predictions\": [...]}.");
    const std::size_t arity = queries_[current_query_].arity;
    if (answer->values.size() != arity)
      throw ProtocolError(ErrorCode::InvalidPrediction, "Expected " + std::to_string(arity) + " prediction values, got " +
                                                            std::to_string(answer->values.size()));
    if (answer->law_description) record_.law_description = answer->law_description;
    record_answer(current_query_, answer->values, false);
  } catch (const ProtocolError& e) {
    json payload{{"code", to_string(e.code())}, {"message", e.what()}, {"index", current_query_}};
    ++retries_;
    if (retries_ <= config_.max_retries) {
      payload["retries_left"] = config_.max_retries - retries_;
      return envelope("error", std::move(payload));
    }
    record_answer(current_query_, std::nullopt, true);
    forfeited = true;
  }
  retries_ = 0;
  ++current_query_;
  if (current_query_ >= queries_.size()) return finish_episode();
  json extra = json::object();
  if (forfeited) extra["previous_forfeited"] = true;
  return query_envelope(current_query_, std::move(extra));
}

json Episode::finish_episode() {
  phase_ = Phase::Done;
  record_.status = "completed";
  json errors = json::array();
  double total = 0.0;
  bool complete = true;
  int forfeits = 0;
  for (const auto& p : record_.predictions) {
    errors.push_back(p.error ? json(*p.error) : json(nullptr));
    if (p.error) total += *p.error;
    else complete = false;
    forfeits += p.forfeit ? 1 : 0;
  }
  if (complete && !record_.predictions.empty()) record_.score = total / static_cast<double>(record_.predictions.size());
  json payload{{"score", record_.score ? json(*record_.score) : json(nullptr)},
               {"metric", record_.metric},
               {"errors", errors},
               {"forfeits", forfeits},
               {"num_queries", record_.predictions.size()}};
  if (config_.variant.kind == VariantKind::ParameterInference) {
    const auto& p = record_.predictions.front();
    ParameterEstimate est;
    est.symbol = config_.variant.symbol;
    est.true_value = p.truth.front();
    if (p.answer) est.estimate = p.answer->front();
    est.abs_error = p.error;
    record_.parameter = est;
    payload["parameter"] = {{"symbol", est.symbol},
                            {"estimate", est.estimate ? json(*est.estimate) : json(nullptr)},
                            {"abs_error", est.abs_error ? json(*est.abs_error) : json(nullptr)}};
  }
  if (config_.disclose_truth) {
    json truths = json::array();
    for (const auto& p : record_.predictions) truths.push_back(p.truth);
    payload["truths"] = truths;
  }
  return envelope("result", std::move(payload));
}

EpisodeRecord run_episode(const EpisodeConfig& config, Agent& agent, const std::string& episode_id,
                          std::shared_ptr<EpisodeStreams> streams, const json& opening_summary) {
  Episode episode(config, episode_id, std::move(streams), opening_summary);
  json message = episode.start();
  while (!episode.done()) {
    std::optional<std::string> reply;
    try {
      reply = agent.respond(message);
    } catch (const std::exception& e) {
      episode.abort(std::string("agent failed: ") + e.what());
      break;
    }
    if (!reply) {
      episode.abort("agent disconnected");
      break;
    }
    message = episode.handle(*reply);
  }
  if (episode.record().status == "completed") agent.finish(message);
  return episode.record();
}

json icl_summary(const std::vector<EpisodeRecord>& previous) {
  json episodes = json::array();
  for (std::size_t i = 0; i < previous.size(); ++i) {
    const EpisodeRecord& rec = previous[i];
    json observations = json::array();
    auto add_observation = [&](const json& payload) {
      if (!payload.contains("observation") || payload["observation"].is_null()) return;
      json item{{"time", payload.at("time")}, {"observation", payload.at("observation")}};
      if (payload.contains("trial")) item["trial"] = payload["trial"];
      observations.push_back(std::move(item));
    };
    for (const auto& t : rec.transcript) {
      const std::string type = t.response.at("type").get<std::string>();
      const json& payload = t.response.at("payload");
      if (type == "observation") add_observation(payload);
      if (type == "prediction_query" && payload.contains("notice") && payload["notice"].contains("final_observation"))
        add_observation(payload["notice"]["final_observation"]);
    }
    json predictions = json::array();
    for (const auto& p : rec.predictions)
      predictions.push_back({{"query_time", query_time_json(p.query)},
                             {"target", p.query.target},
                             {"answer", p.answer ? json(*p.answer) : json(nullptr)},
                             {"error", p.error ? json(*p.error) : json(nullptr)},
                             {"forfeit", p.forfeit}});
    episodes.push_back({{"episode", i},
                        {"status", rec.status},
                        {"observations", observations},
                        {"predictions", predictions},
                        {"score", rec.score ? json(*rec.score) : json(nullptr)}});
  }
  return json{{"episodes", episodes}};
}

std::vector<EpisodeRecord> run_trials(const EpisodeConfig& config, Agent& agent, const std::string& id_prefix) {
  std::vector<EpisodeRecord> records;
  if (config.variant.kind != VariantKind::Icl) {
    records.push_back(run_episode(config, agent, id_prefix + "-0"));
    return records;
  }
  auto streams = std::make_shared<EpisodeStreams>(config.seed);
  for (int i = 0; i < config.variant.num_episodes; ++i) {
    if (i > 0) agent.reset();
    const json summary = i > 0 ? icl_summary(records) : json(nullptr);
    records.push_back(run_episode(config, agent, id_prefix + "-" + std::to_string(i), streams, summary));
    if (records.back().status != "completed") break;
  }
  return records;
}

ParameterInferenceResult run_parameter_inference(const EpisodeConfig& config, Agent& agent) {
  if (config.variant.kind != VariantKind::ParameterInference)
    throw ConfigError("run_parameter_inference requires the parameter_inference variant");
  ParameterInferenceResult out;
  out.record = run_episode(config, agent);
  out.true_value = config.classical.kappa;
  if (out.record.parameter) {
    out.estimate = out.record.parameter->estimate;
    out.abs_error = out.record.parameter->abs_error;
  }
  return out;
}

}  // namespace madphys::harness
