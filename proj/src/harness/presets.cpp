#include "madphys/harness/presets.hpp"

#include "madphys/core/error.hpp"

namespace madphys::harness {

const char* to_string(PresetScale scale) noexcept { return scale == PresetScale::Quick ? "quick" : "paper"; }

PresetScale parse_preset_scale(std::string_view name) {
  if (name == "quick") return PresetScale::Quick;
  if (name == "paper") return PresetScale::Paper;
  throw ConfigError("unknown preset scale '" + std::string(name) + "'");
}

std::vector<std::string> preset_names(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::Classical: return {"normal", "kappa10", "kappa20", "inverse_linear", "ripple", "combined"};
    case EnvironmentKind::Fluid:
      return {"normal", "velocity0.5", "velocity0.7", "vorticity5", "vorticity10", "combined"};
    case EnvironmentKind::Quantum: return {"normal", "p1", "p3", "lambda5", "lambda15", "combined"};
  }
  return {};
}

namespace {

void classical_preset(EpisodeConfig& c, std::string_view name, PresetScale scale) {
  auto& cl = c.classical;
  if (scale == PresetScale::Quick) cl.t_max = 20.0;
  if (name == "normal") return;
  if (name == "kappa10") cl.kappa = 10.0;
  else if (name == "kappa20") cl.kappa = 20.0;
  else if (name == "inverse_linear") cl.gravity.kind = classical::GravityKind::InverseLinear;
  else if (name == "ripple") cl.gravity.kind = classical::GravityKind::Ripple;
  else if (name == "combined") {
    cl.gravity.kind = classical::GravityKind::InverseLinear;
    cl.kappa = 10.0;
  } else {
    throw ConfigError("unknown classical preset '" + std::string(name) + "'");
  }
}

void fluid_preset(EpisodeConfig& c, std::string_view name, PresetScale scale) {
  auto& fl = c.fluid;
  if (scale == PresetScale::Quick) {
    fl.n = 32;
    fl.t_max = 2.0;
  }
  auto& f = fl.forcing;
  if (name == "normal") return;
  if (name == "velocity0.5" || name == "velocity0.7") {
    f.kind = fluid::ForcingKind::VelocityMod;
    f.gamma_velocity = name == "velocity0.5" ? 0.5 : 0.7;
  } else if (name == "vorticity5" || name == "vorticity10") {
    f.kind = fluid::ForcingKind::VorticityMod;
    f.gamma_vorticity = name == "vorticity5" ? 5.0 : 10.0;
  } else if (name == "combined") {
    f.kind = fluid::ForcingKind::Combined;
  } else {
    throw ConfigError("unknown fluid preset '" + std::string(name) + "'");
  }
}

void quantum_preset(EpisodeConfig& c, std::string_view name, PresetScale scale) {
  auto& q = c.quantum;
  if (scale == PresetScale::Quick) {
    // Coarser grid: packet widths must stay resolvable (two cells).
    q.n = 16;
    q.std_range = {1.3, 2.0};
    q.t_max = 1.0;
    q.num_trials = 2;
  }
  if (name == "normal") return;
  if (name == "p1") q.p = 1.0;
  else if (name == "p3") q.p = 3.0;
  else if (name == "lambda5") q.lambda_ent = 5.0;
  else if (name == "lambda15") q.lambda_ent = 15.0;
  else if (name == "combined") {
    q.p = 1.0;
    q.lambda_ent = 25.0;
  } else {
    throw ConfigError("unknown quantum preset '" + std::string(name) + "'");
  }
}

}  // namespace

EpisodeConfig make_preset(EnvironmentKind kind, std::string_view name, PresetScale scale, std::uint64_t seed) {
  EpisodeConfig c;
  c.environment = kind;
  c.seed = seed;
  switch (kind) {
    case EnvironmentKind::Classical: classical_preset(c, name, scale); break;
    case EnvironmentKind::Fluid: fluid_preset(c, name, scale); break;
    case EnvironmentKind::Quantum: quantum_preset(c, name, scale); break;
  }
  c.validate();
  return c;
}

}  // namespace madphys::harness
