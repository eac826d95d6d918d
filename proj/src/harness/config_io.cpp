#include <fstream>
#include <set>
#include <sstream>

#include "madphys/core/error.hpp"
#include "madphys/harness/config.hpp"

namespace madphys::harness {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects any it did not consume.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string where) : object_(object), where_(std::move(where)) {
    if (!object_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    auto it = object_.find(key);
    used_.insert(key);
    if (it == object_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    auto it = object_.find(key);
    used_.insert(key);
    if (it == object_.end() || it->is_null()) return;
    T value{};
    get(key, value);
    out = value;
  }

  const json* child(const char* key) {
    used_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : object_.items())
      if (!used_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
  }

 private:
  const json& object_;
  std::string where_;
  std::set<std::string> used_;
};

json fidelity_map(const std::array<double, 3>& values) {
  return json{{"low", values[0]}, {"medium", values[1]}, {"high", values[2]}};
}

void read_fidelity_map(const json& value, std::array<double, 3>& out, const std::string& where) {
  ObjectReader r(value, where);
  r.get("low", out[0]);
  r.get("medium", out[1]);
  r.get("high", out[2]);
  r.finish();
}

json to_json(const classical::GravityLaw& law) {
  return json{{"kind", classical::to_string(law.kind)},
              {"amplitude", law.amplitude},
              {"wavelength", law.wavelength},
              {"phase", law.phase}};
}

json to_json(const classical::ClassicalConfig& c) {
  return json{{"n_particles", c.n_particles},
              {"dim", c.dim},
              {"dt", c.dt},
              {"budget", c.budget},
              {"G", c.G},
              {"restitution", c.restitution},
              {"t_max", c.t_max},
              {"softening", c.softening},
              {"box_min", c.box_min},
              {"box_max", c.box_max},
              {"kappa", c.kappa},
              {"lambda_decay", c.lambda_decay},
              {"gravity", to_json(c.gravity)},
              {"radius_range", c.radius_range},
              {"mass_range", c.mass_range},
              {"velocity_mean", c.velocity_mean},
              {"velocity_std", c.velocity_std},
              {"max_placement_attempts", c.max_placement_attempts}};
}

void read_classical(const json& value, classical::ClassicalConfig& c) {
  ObjectReader r(value, "classical");
  r.get("n_particles", c.n_particles);
  r.get("dim", c.dim);
  r.get("dt", c.dt);
  r.get("budget", c.budget);
  r.get("G", c.G);
  r.get("restitution", c.restitution);
  r.get("t_max", c.t_max);
  r.get("softening", c.softening);
  r.get("box_min", c.box_min);
  r.get("box_max", c.box_max);
  r.get("kappa", c.kappa);
  r.get("lambda_decay", c.lambda_decay);
  if (const json* g = r.child("gravity")) {
    ObjectReader gr(*g, "classical.gravity");
    std::string kind = classical::to_string(c.gravity.kind);
    gr.get("kind", kind);
    c.gravity.kind = classical::parse_gravity_kind(kind);
    gr.get("amplitude", c.gravity.amplitude);
    gr.get("wavelength", c.gravity.wavelength);
    gr.get("phase", c.gravity.phase);
    gr.finish();
  }
  r.get("radius_range", c.radius_range);
  r.get("mass_range", c.mass_range);
  r.get("velocity_mean", c.velocity_mean);
  r.get("velocity_std", c.velocity_std);
  r.get("max_placement_attempts", c.max_placement_attempts);
  r.finish();
}

json to_json(const fluid::FluidConfig& c) {
  json out{{"n", c.n},
           {"L", c.L},
           {"nu", c.nu},
           {"dt", c.dt},
           {"budget", c.budget},
           {"t_max", c.t_max},
           {"dealias_ratio", c.dealias_ratio},
           {"forcing",
            {{"kind", fluid::to_string(c.forcing.kind)},
             {"gamma_velocity", c.forcing.gamma_velocity},
             {"beta_velocity", c.forcing.beta_velocity},
             {"gamma_vorticity", c.forcing.gamma_vorticity},
             {"beta_vorticity", c.forcing.beta_vorticity},
             {"alpha", c.forcing.alpha}}},
           {"delta_range", c.delta_range},
           {"perturbation_range", c.perturbation_range},
           {"query_points", c.query_points}};
  out["delta"] = c.delta ? json(*c.delta) : json(nullptr);
  out["perturbation_scale"] = c.perturbation_scale ? json(*c.perturbation_scale) : json(nullptr);
  return out;
}

void read_fluid(const json& value, fluid::FluidConfig& c) {
  ObjectReader r(value, "fluid");
  r.get("n", c.n);
  r.get("L", c.L);
  r.get("nu", c.nu);
  r.get("dt", c.dt);
  r.get("budget", c.budget);
  r.get("t_max", c.t_max);
  r.get("dealias_ratio", c.dealias_ratio);
  if (const json* f = r.child("forcing")) {
    ObjectReader fr(*f, "fluid.forcing");
    std::string kind = fluid::to_string(c.forcing.kind);
    fr.get("kind", kind);
    c.forcing.kind = fluid::parse_forcing_kind(kind);
    fr.get("gamma_velocity", c.forcing.gamma_velocity);
    fr.get("beta_velocity", c.forcing.beta_velocity);
    fr.get("gamma_vorticity", c.forcing.gamma_vorticity);
    fr.get("beta_vorticity", c.forcing.beta_vorticity);
    fr.get("alpha", c.forcing.alpha);
    fr.finish();
  }
  r.get("delta_range", c.delta_range);
  r.get("perturbation_range", c.perturbation_range);
  r.get_optional("delta", c.delta);
  r.get_optional("perturbation_scale", c.perturbation_scale);
  r.get("query_points", c.query_points);
  r.finish();
}

json to_json(const quantum::PacketParams& p) {
  return json{{"mass", p.mass}, {"mean", p.mean}, {"std", p.std}, {"velocity", p.velocity}};
}

quantum::PacketParams read_packet(const json& value, const std::string& where) {
  quantum::PacketParams p;
  ObjectReader r(value, where);
  r.get("mass", p.mass);
  r.get("mean", p.mean);
  r.get("std", p.std);
  r.get("velocity", p.velocity);
  r.finish();
  return p;
}

json to_json(const quantum::QuantumConfig& c) {
  json out{{"n", c.n},
           {"domain", c.domain},
           {"box", c.box},
           {"hbar", c.hbar},
           {"dt", c.dt},
           {"well_height", c.well_height},
           {"t_max", c.t_max},
           {"budget_per_trial", c.budget_per_trial},
           {"num_trials", c.num_trials},
           {"p", c.p},
           {"lambda_ent", c.lambda_ent},
           {"wall_width_cells", c.wall_width_cells},
           {"collapse_width_cells", c.collapse_width_cells},
           {"mass_range", c.mass_range},
           {"mean_range", c.mean_range},
           {"std_range", c.std_range},
           {"velocity_range", c.velocity_range}};
  if (c.packets) {
    out["packets"] = json::array({to_json((*c.packets)[0]), to_json((*c.packets)[1])});
  } else {
    out["packets"] = nullptr;
  }
  return out;
}

void read_quantum(const json& value, quantum::QuantumConfig& c) {
  ObjectReader r(value, "quantum");
  r.get("n", c.n);
  r.get("domain", c.domain);
  r.get("box", c.box);
  r.get("hbar", c.hbar);
  r.get("dt", c.dt);
  r.get("well_height", c.well_height);
  r.get("t_max", c.t_max);
  r.get("budget_per_trial", c.budget_per_trial);
  r.get("num_trials", c.num_trials);
  r.get("p", c.p);
  r.get("lambda_ent", c.lambda_ent);
  r.get("wall_width_cells", c.wall_width_cells);
  r.get("collapse_width_cells", c.collapse_width_cells);
  r.get("mass_range", c.mass_range);
  r.get("mean_range", c.mean_range);
  r.get("std_range", c.std_range);
  r.get("velocity_range", c.velocity_range);
  if (const json* packets = r.child("packets"); packets && !packets->is_null()) {
    if (!packets->is_array() || packets->size() != 2)
      throw ConfigError("quantum.packets: expected an array of two packets");
    c.packets = std::array<quantum::PacketParams, 2>{read_packet((*packets)[0], "quantum.packets[0]"),
                                                     read_packet((*packets)[1], "quantum.packets[1]")};
  }
  r.finish();
}

}  // namespace

const char* to_string(VariantKind kind) noexcept {
  switch (kind) {
    case VariantKind::Standard: return "standard";
    case VariantKind::Visual: return "visual";
    case VariantKind::Icl: return "icl";
    case VariantKind::ParameterInference: return "parameter_inference";
  }
  return "unknown";
}

void EpisodeConfig::validate() const {
  if (num_queries < 1) throw ConfigError("num_queries must be >= 1");
  if (!(horizon_factor > 1.0)) throw ConfigError("horizon_factor must be > 1");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (max_skipped_turns < 1) throw ConfigError("max_skipped_turns must be >= 1");
  cost_model.validate();
  switch (environment) {
    case EnvironmentKind::Classical: classical.validate(); break;
    case EnvironmentKind::Fluid: fluid.validate(); break;
    case EnvironmentKind::Quantum: quantum.validate(); break;
  }
  switch (variant.kind) {
    case VariantKind::Standard: break;
    case VariantKind::Visual:
      if (environment != EnvironmentKind::Classical)
        throw ConfigError("visual variant is only available for the classical environment");
      if (classical.dim != 2) throw ConfigError("visual variant requires a 2D classical system");
      if (variant.image_size < 16 || variant.image_size > 4096)
        throw ConfigError("visual image_size must be in [16, 4096]");
      break;
    case VariantKind::Icl:
      if (variant.num_episodes < 1) throw ConfigError("icl num_episodes must be >= 1");
      break;
    case VariantKind::ParameterInference:
      if (environment != EnvironmentKind::Classical)
        throw ConfigError("parameter inference is only available for the classical environment");
      if (variant.symbol != "kappa") throw ConfigError("parameter inference supports only 'kappa'");
      break;
  }
}

json to_json(const EpisodeConfig& c) {
  json variant{{"kind", to_string(c.variant.kind)}};
  switch (c.variant.kind) {
    case VariantKind::Visual: variant["image_size"] = c.variant.image_size; break;
    case VariantKind::Icl: variant["num_episodes"] = c.variant.num_episodes; break;
    case VariantKind::ParameterInference: variant["symbol"] = c.variant.symbol; break;
    case VariantKind::Standard: break;
  }
  json out{{"environment", to_string(c.environment)},
           {"seed", c.seed},
           {"num_queries", c.num_queries},
           {"horizon_factor", c.horizon_factor},
           {"variant", variant},
           {"max_retries", c.max_retries},
           {"max_skipped_turns", c.max_skipped_turns},
           {"disclose_truth", c.disclose_truth},
           {"cost_model", {{"cost", fidelity_map(c.cost_model.cost)}, {"noise", fidelity_map(c.cost_model.noise_sigma)}}}};
  switch (c.environment) {
    case EnvironmentKind::Classical: out["classical"] = to_json(c.classical); break;
    case EnvironmentKind::Fluid: out["fluid"] = to_json(c.fluid); break;
    case EnvironmentKind::Quantum: out["quantum"] = to_json(c.quantum); break;
  }
  return out;
}

EpisodeConfig episode_config_from_json(const json& value) {
  EpisodeConfig c;
  ObjectReader r(value, "config");
  std::string environment = "classical";
  r.get("environment", environment);
  c.environment = parse_environment_kind(environment);
  r.get("seed", c.seed);
  r.get("num_queries", c.num_queries);
  r.get("horizon_factor", c.horizon_factor);
  r.get("max_retries", c.max_retries);
  r.get("max_skipped_turns", c.max_skipped_turns);
  r.get("disclose_truth", c.disclose_truth);
  if (const json* v = r.child("variant")) {
    ObjectReader vr(*v, "variant");
    std::string kind = "standard";
    vr.get("kind", kind);
    if (kind == "standard") c.variant.kind = VariantKind::Standard;
    else if (kind == "visual") c.variant.kind = VariantKind::Visual;
    else if (kind == "icl") c.variant.kind = VariantKind::Icl;
    else if (kind == "parameter_inference") c.variant.kind = VariantKind::ParameterInference;
    else throw ConfigError("variant.kind: unknown variant '" + kind + "'");
    vr.get("image_size", c.variant.image_size);
    vr.get("num_episodes", c.variant.num_episodes);
    vr.get("symbol", c.variant.symbol);
    vr.finish();
  }
  if (const json* cm = r.child("cost_model")) {
    ObjectReader cr(*cm, "cost_model");
    if (const json* cost = cr.child("cost")) read_fidelity_map(*cost, c.cost_model.cost, "cost_model.cost");
    if (const json* noise = cr.child("noise"))
      read_fidelity_map(*noise, c.cost_model.noise_sigma, "cost_model.noise");
    cr.finish();
  }
  if (const json* v = r.child("classical")) read_classical(*v, c.classical);
  if (const json* v = r.child("fluid")) read_fluid(*v, c.fluid);
  if (const json* v = r.child("quantum")) read_quantum(*v, c.quantum);
  r.finish();
  c.validate();
  return c;
}

EpisodeConfig load_episode_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json value;
  try {
    value = json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return episode_config_from_json(value);
}

}  // namespace madphys::harness
