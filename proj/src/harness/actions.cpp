#include "madphys/harness/actions.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "madphys/core/error.hpp"

namespace madphys::harness {

using nlohmann::json;

namespace {

constexpr const char* kNonFinite = "\x01nonfinite";

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw ProtocolError(code, message); }

// Python's json module writes NaN / Infinity for non-finite floats. Those
// tokens are rewritten to a marker string so they surface as range errors on
// the field that carried them instead of a generic syntax error.
std::optional<std::string> rewrite_nonfinite_tokens(std::string_view raw) {
  std::string out;
  out.reserve(raw.size() + 16);
  bool in_string = false;
  bool changed = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < raw.size()) {
        out.push_back(raw[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    bool matched = false;
    for (std::string_view token : {"-Infinity", "Infinity", "NaN"}) {
      if (raw.substr(i, token.size()) == token) {
        out += "\"\\u0001nonfinite\"";
        i += token.size() - 1;
        matched = changed = true;
        break;
      }
    }
    if (!matched) out.push_back(c);
  }
  if (!changed) return std::nullopt;
  return out;
}

json parse_json(std::string_view raw) {
  try {
    return json::parse(raw);
  } catch (const json::exception& first) {
    if (auto rewritten = rewrite_nonfinite_tokens(raw)) {
      try {
        return json::parse(*rewritten);
      } catch (const json::exception&) {
      }
    }
    fail(ErrorCode::Parse, std::string("Message is not valid JSON: ") + first.what());
  }
}

bool is_nonfinite_marker(const json& value) {
  return value.is_string() && value.get_ref<const std::string&>() == kNonFinite;
}

void require_object(const json& value, const std::string& what) {
  if (!value.is_object()) fail(ErrorCode::InvalidType, what + " must be a JSON object");
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (auto name : allowed) ok = ok || key == name;
    if (!ok) fail(ErrorCode::UnknownField, "Unknown field '" + key + "' in " + where);
  }
}

const json& require_field(const json& object, const std::string& key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) fail(ErrorCode::MissingField, "Missing field '" + key + "' in " + where);
  return *it;
}

// Number (or non-finite marker) -> double; `range_code` is raised for
// non-finite values.
double read_number(const json& value, const std::string& key, ErrorCode range_code) {
  if (is_nonfinite_marker(value)) fail(range_code, "Field '" + key + "' must be finite");
  if (!value.is_number()) fail(ErrorCode::InvalidType, "Field '" + key + "' must be a number");
  const double out = value.get<double>();
  if (!std::isfinite(out)) fail(range_code, "Field '" + key + "' must be finite");
  return out;
}

double read_time_delta(const json& object, const std::string& where) {
  const double dt = read_number(require_field(object, "time_delta", where), "time_delta",
                                ErrorCode::InvalidTimeDelta);
  if (!(dt > 0.0)) fail(ErrorCode::InvalidTimeDelta, "time_delta must be positive");
  return dt;
}

protocol::Fidelity read_quality(const json& object, const std::string& where) {
  const json& value = require_field(object, "quality", where);
  if (!value.is_string() || is_nonfinite_marker(value))
    fail(ErrorCode::InvalidType, "Field 'quality' must be a string");
  auto parsed = protocol::parse_fidelity(value.get_ref<const std::string&>());
  if (!parsed)
    fail(ErrorCode::InvalidQuality,
         "Invalid quality '" + value.get<std::string>() + "'; use high, medium or low");
  return *parsed;
}

const json& read_selection(const json& object) {
  const json& selection = require_field(object, "selection", "action");
  if (!selection.is_array()) fail(ErrorCode::InvalidType, "Field 'selection' must be an array");
  if (selection.empty()) fail(ErrorCode::EmptySelection, "Empty selection: choose at least one item to observe");
  return selection;
}

ClassicalRequest parse_classical(const json& object) {
  reject_unknown(object, {"selection", "time_delta"}, "action");
  ClassicalRequest request;
  std::set<std::size_t> seen;
  for (const json& item : read_selection(object)) {
    require_object(item, "selection entry");
    reject_unknown(item, {"object_id", "quality"}, "selection entry");
    const json& id = require_field(item, "object_id", "selection entry");
    if (!id.is_number()) fail(ErrorCode::InvalidType, "Field 'object_id' must be an integer");
    if (id.is_number_float()) {
      const double value = id.get<double>();
      if (value != std::floor(value)) fail(ErrorCode::InvalidType, "Field 'object_id' must be an integer");
      if (value < 0.0) fail(ErrorCode::InvalidObject, "object_id must be non-negative");
    }
    if (id.is_number_integer() && !id.is_number_unsigned() && id.get<std::int64_t>() < 0)
      fail(ErrorCode::InvalidObject, "object_id must be non-negative");
    const auto object_id = static_cast<std::size_t>(id.is_number_float() ? id.get<double>() : id.get<std::uint64_t>());
    if (!seen.insert(object_id).second)
      fail(ErrorCode::DuplicateObject, "object_id " + std::to_string(object_id) + " selected twice");
    request.selection.push_back({object_id, read_quality(item, "selection entry")});
  }
  request.time_delta = read_time_delta(object, "action");
  return request;
}

FluidRequest parse_fluid(const json& object) {
  reject_unknown(object, {"selection", "time_delta"}, "action");
  FluidRequest request;
  for (const json& item : read_selection(object)) {
    require_object(item, "selection entry");
    reject_unknown(item, {"x", "y", "quality"}, "selection entry");
    PointSelection point;
    point.x = read_number(require_field(item, "x", "selection entry"), "x", ErrorCode::InvalidCoordinate);
    point.y = read_number(require_field(item, "y", "selection entry"), "y", ErrorCode::InvalidCoordinate);
    point.quality = read_quality(item, "selection entry");
    request.selection.push_back(point);
  }
  request.time_delta = read_time_delta(object, "action");
  return request;
}

QuantumRequest parse_quantum(const json& object) {
  reject_unknown(object, {"particle", "time_delta", "quality"}, "action");
  QuantumRequest request;
  const json& particle = require_field(object, "particle", "action");
  if (!particle.is_number()) fail(ErrorCode::InvalidType, "Field 'particle' must be an integer");
  const double value = particle.get<double>();
  if (value != 1.0 && value != 2.0) fail(ErrorCode::InvalidParticle, "particle must be 1 or 2");
  request.particle = static_cast<int>(value);
  request.time_delta = read_time_delta(object, "action");
  request.quality = read_quality(object, "action");
  return request;
}

PredictionAnswer parse_prediction(const json& object) {
  reject_unknown(object, {"predictions", "law_description"}, "prediction");
  PredictionAnswer answer;
  const json& values = object.at("predictions");
  if (!values.is_array()) fail(ErrorCode::InvalidPrediction, "Field 'predictions' must be an array of numbers");
  for (const json& v : values) {
    if (!v.is_number() || is_nonfinite_marker(v))
      fail(ErrorCode::InvalidPrediction, "Predictions must be finite numbers");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ErrorCode::InvalidPrediction, "Predictions must be finite numbers");
    answer.values.push_back(d);
  }
  if (auto it = object.find("law_description"); it != object.end()) {
    if (!it->is_string()) fail(ErrorCode::InvalidType, "Field 'law_description' must be a string");
    answer.law_description = it->get<std::string>();
  }
  return answer;
}

bool read_flag(const json& object, const std::string& key) {
  const json& value = object.at(key);
  if (!value.is_boolean()) fail(ErrorCode::InvalidType, "Field '" + key + "' must be true");
  if (!value.get<bool>()) fail(ErrorCode::InvalidType, "Field '" + key + "' must be true");
  return true;
}

}  // namespace

const char* to_string(EnvironmentKind kind) noexcept {
  switch (kind) {
    case EnvironmentKind::Classical: return "classical";
    case EnvironmentKind::Fluid: return "fluid";
    case EnvironmentKind::Quantum: return "quantum";
  }
  return "unknown";
}

EnvironmentKind parse_environment_kind(std::string_view name) {
  if (name == "classical") return EnvironmentKind::Classical;
  if (name == "fluid") return EnvironmentKind::Fluid;
  if (name == "quantum") return EnvironmentKind::Quantum;
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

AgentAction parse_action(std::string_view raw, EnvironmentKind kind) {
  const json object = parse_json(raw);
  require_object(object, "Message");
  if (object.contains("predictions")) return parse_prediction(object);
  if (object.contains("finish")) {
    reject_unknown(object, {"finish"}, "finish message");
    read_flag(object, "finish");
    return FinishRequest{};
  }
  if (object.contains("next_trial")) {
    reject_unknown(object, {"next_trial"}, "next_trial message");
    read_flag(object, "next_trial");
    return NextTrialRequest{};
  }
  switch (kind) {
    case EnvironmentKind::Classical: return MeasurementRequest{parse_classical(object)};
    case EnvironmentKind::Fluid: return MeasurementRequest{parse_fluid(object)};
    case EnvironmentKind::Quantum: return MeasurementRequest{parse_quantum(object)};
  }
  fail(ErrorCode::Parse, "unsupported environment");
}

std::vector<protocol::Fidelity> request_fidelities(const MeasurementRequest& request) {
  std::vector<protocol::Fidelity> out;
  if (const auto* c = std::get_if<ClassicalRequest>(&request)) {
    for (const auto& s : c->selection) out.push_back(s.quality);
  } else if (const auto* f = std::get_if<FluidRequest>(&request)) {
    for (const auto& s : f->selection) out.push_back(s.quality);
  } else {
    out.push_back(std::get<QuantumRequest>(request).quality);
  }
  return out;
}

double request_time_delta(const MeasurementRequest& request) {
  return std::visit([](const auto& r) { return r.time_delta; }, request);
}

}  // namespace madphys::harness
