#include "madphys/harness/record.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "madphys/core/error.hpp"

namespace madphys::harness {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_number(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

json to_json(const EpisodeRecord& r) {
  json transcript = json::array();
  for (const auto& t : r.transcript)
    transcript.push_back({{"phase", t.phase},
                          {"agent", t.agent},
                          {"response", t.response},
                          {"cost", t.cost},
                          {"time", t.time},
                          {"trial", t.trial}});
  json predictions = json::array();
  for (const auto& p : r.predictions)
    predictions.push_back({{"index", p.query.index},
                           {"query_time", std::isnan(p.query.time) ? json(nullptr) : json(p.query.time)},
                           {"query_step", p.query.step},
                           {"target", p.query.target},
                           {"arity", p.query.arity},
                           {"answer", p.answer ? json(*p.answer) : json(nullptr)},
                           {"truth", p.truth},
                           {"error", optional_number(p.error)},
                           {"forfeit", p.forfeit}});
  json out{{"schema_version", r.schema_version},
           {"episode_id", r.episode_id},
           {"config", r.config},
           {"noise_offset", r.noise_offset},
           {"query_offset", r.query_offset},
           {"opening_summary", r.opening_summary},
           {"briefing", r.briefing},
           {"transcript", transcript},
           {"predictions", predictions},
           {"score", optional_number(r.score)},
           {"metric", r.metric},
           {"law_description", r.law_description ? json(*r.law_description) : json(nullptr)},
           {"status", r.status},
           {"abort_reason", r.abort_reason}};
  if (r.parameter) {
    out["parameter"] = {{"symbol", r.parameter->symbol},
                        {"true_value", r.parameter->true_value},
                        {"estimate", optional_number(r.parameter->estimate)},
                        {"abs_error", optional_number(r.parameter->abs_error)}};
  } else {
    out["parameter"] = nullptr;
  }
  return out;
}

EpisodeRecord record_from_json(const json& v) {
  try {
    EpisodeRecord r;
    r.schema_version = v.at("schema_version").get<int>();
    if (r.schema_version != kRecordSchemaVersion)
      throw ConfigError("episode record: unsupported schema_version " + std::to_string(r.schema_version));
    r.episode_id = v.at("episode_id").get<std::string>();
    r.config = v.at("config");
    r.noise_offset = v.at("noise_offset").get<std::uint64_t>();
    r.query_offset = v.at("query_offset").get<std::uint64_t>();
    r.opening_summary = v.at("opening_summary");
    r.briefing = v.at("briefing");
    for (const auto& t : v.at("transcript"))
      r.transcript.push_back({t.at("phase").get<std::string>(), t.at("agent").get<std::string>(), t.at("response"),
                              t.at("cost").get<double>(), t.at("time").get<double>(), t.at("trial").get<int>()});
    for (const auto& p : v.at("predictions")) {
      PredictionRecord rec;
      rec.query.index = p.at("index").get<int>();
      rec.query.time = p.at("query_time").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                    : p.at("query_time").get<double>();
      rec.query.step = p.at("query_step").get<std::int64_t>();
      rec.query.target = p.at("target");
      rec.query.arity = p.at("arity").get<std::size_t>();
      if (!p.at("answer").is_null()) rec.answer = p.at("answer").get<std::vector<double>>();
      rec.truth = p.at("truth").get<std::vector<double>>();
      rec.error = read_optional_number(p.at("error"));
      rec.forfeit = p.at("forfeit").get<bool>();
      r.predictions.push_back(std::move(rec));
    }
    r.score = read_optional_number(v.at("score"));
    r.metric = v.at("metric").get<std::string>();
    if (!v.at("law_description").is_null()) r.law_description = v.at("law_description").get<std::string>();
    if (const json& p = v.at("parameter"); !p.is_null()) {
      ParameterEstimate est;
      est.symbol = p.at("symbol").get<std::string>();
      est.true_value = p.at("true_value").get<double>();
      est.estimate = read_optional_number(p.at("estimate"));
      est.abs_error = read_optional_number(p.at("abs_error"));
      r.parameter = est;
    }
    r.status = v.at("status").get<std::string>();
    r.abort_reason = v.at("abort_reason").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("episode record: ") + e.what());
  }
}

void write_records(const std::string& path, const std::vector<EpisodeRecord>& records, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw ConfigError("cannot write log file '" + path + "'");
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw ConfigError("failed writing log file '" + path + "'");
}

std::vector<EpisodeRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open log file '" + path + "'");
  std::vector<EpisodeRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError("log file '" + path + "': " + e.what());
    }
  }
  return out;
}

ReplayResult replay(const EpisodeRecord& record) {
  ReplayResult result;
  const EpisodeConfig config = episode_config_from_json(record.config);
  auto streams = std::make_shared<EpisodeStreams>(config.seed);
  for (std::uint64_t i = 0; i < record.noise_offset; ++i) streams->noise.next_u64();
  for (std::uint64_t i = 0; i < record.query_offset; ++i) streams->query.next_u64();
  Episode episode(config, record.episode_id, streams, record.opening_summary);
  const json briefing = episode.start();
  if (briefing.dump() != record.briefing.dump()) {
    result.identical = false;
    result.first_mismatch = -1;
    result.detail = "briefing differs";
    return result;
  }
  for (std::size_t i = 0; i < record.transcript.size(); ++i) {
    const json response = episode.handle(record.transcript[i].agent);
    if (response.dump() != record.transcript[i].response.dump()) {
      result.identical = false;
      result.first_mismatch = static_cast<long>(i);
      result.detail = "turn " + std::to_string(i) + ": expected " + record.transcript[i].response.dump() + ", got " +
                      response.dump();
      return result;
    }
  }
  result.score = episode.record().score;
  return result;
}

}  // namespace madphys::harness
