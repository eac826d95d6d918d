#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "madphys/harness/episode.hpp"

namespace testagents {

/// Replies from a fixed script during measurement, then with callback answers.
class ScriptedAgent : public madphys::harness::Agent {
 public:
  using Answer = std::function<std::string(const nlohmann::json& envelope)>;

  ScriptedAgent(std::vector<std::string> script, Answer answer) : script_(script.begin(), script.end()), answer_(std::move(answer)) {}

  std::optional<std::string> respond(const nlohmann::json& envelope) override {
    seen.push_back(envelope);
    if (envelope.at("type") == "prediction_query") {
      last_query_ = envelope;
      return answer_(envelope);
    }
    if (envelope.at("type") == "result") return std::nullopt;
    if (!last_query_.is_null()) return answer_(last_query_);
    if (script_.empty()) return std::string(R"({"finish":true})");
    std::string next = script_.front();
    script_.pop_front();
    return next;
  }
  void finish(const nlohmann::json& result) override { this->result = result; }

  std::vector<nlohmann::json> seen;
  nlohmann::json result;

 private:
  std::deque<std::string> script_;
  nlohmann::json last_query_;
  Answer answer_;
};

/// Answers every query with the disclosed truth.
inline std::string echo_truth(const nlohmann::json& envelope) {
  return nlohmann::json{{"predictions", envelope.at("payload").at("truth")}}.dump();
}

/// Answers every query with zeros of the requested arity.
inline std::string zeros(const nlohmann::json& envelope) {
  const std::size_t arity = envelope.at("payload").at("arity").get<std::size_t>();
  return nlohmann::json{{"predictions", std::vector<double>(arity, 0.0)}}.dump();
}

/// Classical measurement of every object at one quality.
inline std::string observe_all(std::size_t count, const char* quality, double time_delta) {
  nlohmann::json selection = nlohmann::json::array();
  for (std::size_t k = 0; k < count; ++k) selection.push_back({{"object_id", k}, {"quality", quality}});
  return nlohmann::json{{"selection", selection}, {"time_delta", time_delta}}.dump();
}

}  // namespace testagents
