#include "madphys/harness/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "madphys/core/error.hpp"
#include "madphys/harness/briefing.hpp"
#include "madphys/harness/render.hpp"
#include "madphys/protocol/format.hpp"
#include "madphys/protocol/metrics.hpp"
#include "madphys/protocol/query.hpp"

namespace madphys::harness {

using nlohmann::json;
using protocol::format_budget;
using protocol::format_fixed;

namespace {

std::string fixed5(double v) { return format_fixed(v, 5); }

json fixed_list(std::span<const double> values) {
  json out = json::array();
  for (double v : values) out.push_back(fixed5(v));
  return out;
}

json fidelity_table(const std::array<double, 3>& values) {
  json out = json::object();
  for (auto f : protocol::kAllFidelities) out[protocol::to_string(f)] = values[static_cast<std::size_t>(f)];
  return out;
}

// Queries are evaluated in time order so one trajectory serves all of them.
std::vector<std::size_t> time_order(const std::vector<PredictionQuery>& queries) {
  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return queries[a].step < queries[b].step; });
  return order;
}

std::int64_t max_measurement_steps(double t_max, double dt) {
  return protocol::Clock(dt, t_max).max_steps();
}

}  // namespace

std::vector<PredictionQuery> EpisodeEnvironment::make_queries(int count, double horizon_factor,
                                                              numerics::SeededRng& query_rng) const {
  std::vector<PredictionQuery> out;
  const std::int64_t max_steps = max_measurement_steps(t_max(), dt());
  for (int i = 0; i < count; ++i) {
    PredictionQuery q;
    q.index = i;
    q.time = protocol::sample_query(t_max(), horizon_factor, query_rng);
    q.step = protocol::query_step(q.time, dt(), max_steps);
    fill_target(q, query_rng);
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------- classical

ClassicalEnvironment::ClassicalEnvironment(const classical::ClassicalConfig& config,
                                           const protocol::CostModel& costs, std::uint64_t seed,
                                           int visual_size, bool parameter_inference)
    : costs_(costs),
      initial_([&] {
        numerics::SeededRng rng(seed, numerics::Stream::Init);
        return classical::init_classical(config, rng);
      }()),
      sim_(config, initial_),
      visual_size_(visual_size),
      parameter_inference_(parameter_inference) {}

json ClassicalEnvironment::briefing() const {
  const auto& c = sim_.config();
  const auto& s = initial_;
  const std::size_t d = static_cast<std::size_t>(c.dim);
  json velocities = json::array();
  for (std::size_t i = 0; i < s.n; ++i)
    velocities.push_back(fixed_list(std::span<const double>(s.v).subspan(i * d, d)));
  const std::vector<double> box_min(d, c.box_min), box_max(d, c.box_max);

  json parameters{{"num_objects", s.n},
                  {"dim", c.dim},
                  {"G", c.G},
                  {"box_min", box_min},
                  {"box_max", box_max},
                  {"masses", fixed_list(s.mass)},
                  {"velocities", velocities},
                  {"radii", fixed_list(s.radius)},
                  {"budget", c.budget},
                  {"max_time", c.t_max},
                  {"dt", c.dt},
                  {"softening", c.softening},
                  {"restitution", c.restitution},
                  {"cost", fidelity_table(costs_.cost)},
                  {"noise", fidelity_table(costs_.noise_sigma)}};

  std::string text = interpolate(
      briefing_template(EnvironmentKind::Classical),
      {{"num_objects", std::to_string(s.n)},
       {"dim", std::to_string(c.dim)},
       {"G", format_budget(c.G)},
       {"box_min", json(box_min).dump()},
       {"box_max", json(box_max).dump()},
       {"masses", parameters["masses"].dump()},
       {"velocities", velocities.dump()},
       {"radii", parameters["radii"].dump()},
       {"budget", format_budget(c.budget)},
       {"max_time", format_budget(c.t_max)},
       {"costs", parameters["cost"].dump()},
       {"noise", parameters["noise"].dump()}});
  if (parameter_inference_) {
    parameters["lambda_decay"] = c.lambda_decay;
    parameters["gravity"] = classical::to_string(c.gravity.kind);
    std::string law = classical::to_string(c.gravity.kind);
    if (c.gravity.kind == classical::GravityKind::Ripple)
      law += " (amplitude " + format_budget(c.gravity.amplitude) + ", wavelength " +
             format_budget(c.gravity.wavelength) + ", phase " + format_budget(c.gravity.phase) + ")";
    text += "\n" + interpolate(parameter_inference_template(),
                               {{"lambda_decay", format_budget(c.lambda_decay)}, {"gravity", law}});
  }

  json observation = json::object();
  for (std::size_t i = 0; i < s.n; ++i)
    observation["object_" + std::to_string(i)] = {
        {"position", fixed_list(std::span<const double>(s.x).subspan(i * d, d))}};
  json out{{"text", text}, {"parameters", parameters}};
  if (visual_size_ > 0) {
    out["initial_observation"] = {
        {"time", 0.0},
        {"image_png_base64", base64_encode(render_classical(s, c, visual_size_))},
        {"image_size", visual_size_}};
  } else {
    out["initial_observation"] = {{"time", 0.0}, {"observation", observation}};
  }
  return out;
}

void ClassicalEnvironment::validate(const MeasurementRequest& request) const {
  const auto* r = std::get_if<ClassicalRequest>(&request);
  if (!r) throw ProtocolError(ErrorCode::Parse, "not a classical action");
  if (r->selection.empty()) throw ProtocolError(ErrorCode::EmptySelection, "Empty selection: choose at least one object");
  for (const auto& s : r->selection)
    if (s.object_id >= initial_.n)
      throw ProtocolError(ErrorCode::InvalidObject, "Invalid object_id " + std::to_string(s.object_id) +
                                                        "; valid ids are 0 to " + std::to_string(initial_.n - 1));
}

json ClassicalEnvironment::observe(const MeasurementRequest& request, numerics::SeededRng& noise) {
  const auto& r = std::get<ClassicalRequest>(request);
  std::vector<std::pair<std::size_t, protocol::Fidelity>> selection;
  for (const auto& s : r.selection) selection.emplace_back(s.object_id, s.quality);
  const auto observed = classical::observe_positions(sim_.state(), selection, costs_, noise);
  const std::size_t d = static_cast<std::size_t>(sim_.config().dim);
  if (visual_size_ > 0) {
    std::vector<Disc> discs;
    for (const auto& o : observed)
      discs.push_back({o.position[0], o.position[1], sim_.state().radius[o.object_id], o.object_id});
    const auto png = encode_png(render_discs(discs, sim_.config().box_min, sim_.config().box_max, visual_size_));
    return json{{"image_png_base64", base64_encode(png)}, {"image_size", visual_size_}};
  }
  json out = json::object();
  for (const auto& o : observed)
    out["object_" + std::to_string(o.object_id)] = {
        {"position", fixed_list(std::span<const double>(o.position.data(), d))}};
  return out;
}

std::vector<PredictionQuery> ClassicalEnvironment::make_queries(int count, double horizon_factor,
                                                                numerics::SeededRng& query_rng) const {
  if (!parameter_inference_) return EpisodeEnvironment::make_queries(count, horizon_factor, query_rng);
  PredictionQuery q;
  q.time = std::numeric_limits<double>::quiet_NaN();
  q.step = -1;
  q.target = {{"kind", "parameter"}, {"symbol", "kappa"}};
  q.arity = 1;
  return {q};
}

void ClassicalEnvironment::fill_target(PredictionQuery& q, numerics::SeededRng&) const {
  q.target = {{"kind", "positions"}, {"num_objects", initial_.n}, {"dim", sim_.config().dim}};
  q.arity = initial_.n * static_cast<std::size_t>(sim_.config().dim);
}

std::vector<std::vector<double>> ClassicalEnvironment::truths(const std::vector<PredictionQuery>& queries) const {
  std::vector<std::vector<double>> out(queries.size());
  if (parameter_inference_) {
    for (auto& t : out) t = {sim_.config().kappa};
    return out;
  }
  classical::ClassicalSimulation future = sim_;
  for (std::size_t k : time_order(queries)) {
    future.advance_to_step(std::max(queries[k].step, future.clock().step_count()));
    out[k] = classical::classical_truth(future.state());
  }
  return out;
}

double ClassicalEnvironment::score(std::span<const double> prediction, std::span<const double> truth) const {
  if (parameter_inference_) {
    if (prediction.size() != 1 || truth.size() != 1) throw ArgumentError("parameter score expects one value");
    return std::abs(prediction[0] - truth[0]);
  }
  return protocol::nrmse(prediction, truth, sim_.config().box_diagonal());
}

// -------------------------------------------------------------------- fluid

FluidEnvironment::FluidEnvironment(const fluid::FluidConfig& config, const protocol::CostModel& costs,
                                   std::uint64_t seed)
    : costs_(costs), solver_(config) {
  numerics::SeededRng rng(seed, numerics::Stream::Init);
  shear_ = fluid::draw_shear_layer(config, rng);
  field_ = solver_.kelvin_helmholtz(shear_);
}

json FluidEnvironment::briefing() const {
  const auto& c = solver_.config();
  json parameters{{"n", c.n},
                  {"L", c.L},
                  {"viscosity", c.nu},
                  {"dt", c.dt},
                  {"budget", c.budget},
                  {"max_time", c.t_max},
                  {"delta", shear_.delta},
                  {"perturbation_scale", shear_.perturbation_scale},
                  {"cost", fidelity_table(costs_.cost)},
                  {"noise", fidelity_table(costs_.noise_sigma)}};
  const std::string shear_info =
      "- Double shear layer: u(y) = tanh((y - L/4)/delta) - tanh((y - 3L/4)/delta) - 1 with delta = " +
      fixed5(shear_.delta) + ", L = 2*pi.\n- Transverse perturbation v = " + fixed5(shear_.perturbation_scale) +
      " * sin(2*pi*x/L), concentrated near the two interfaces.";
  std::string text = interpolate(briefing_template(EnvironmentKind::Fluid),
                                 {{"n", std::to_string(c.n)},
                                  {"viscosity", format_budget(c.nu)},
                                  {"dt", format_budget(c.dt)},
                                  {"shear_info", shear_info},
                                  {"budget", format_budget(c.budget)},
                                  {"max_time", format_budget(c.t_max)},
                                  {"costs", parameters["cost"].dump()},
                                  {"noise", parameters["noise"].dump()}});
  return json{{"text", text}, {"parameters", parameters}};
}

void FluidEnvironment::validate(const MeasurementRequest& request) const {
  const auto* r = std::get_if<FluidRequest>(&request);
  if (!r) throw ProtocolError(ErrorCode::Parse, "not a fluid action");
  if (r->selection.empty()) throw ProtocolError(ErrorCode::EmptySelection, "Empty selection: choose at least one point");
  for (const auto& p : r->selection)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw ProtocolError(ErrorCode::InvalidCoordinate, "Coordinates must be finite");
}

void FluidEnvironment::advance_to_step(std::int64_t step) {
  if (step < step_) throw ArgumentError("FluidEnvironment: cannot step backwards");
  while (step_ < step) solver_.rk4_step(field_, ++step_);
}

json FluidEnvironment::observe(const MeasurementRequest& request, numerics::SeededRng& noise) {
  const auto& r = std::get<FluidRequest>(request);
  std::vector<std::pair<std::array<double, 2>, protocol::Fidelity>> points;
  for (const auto& p : r.selection) points.push_back({{p.x, p.y}, p.quality});
  const auto omega = solver_.to_physical(field_);
  const auto observed = fluid::observe_vorticity(omega, points, costs_, noise);
  json out = json::object();
  for (std::size_t i = 0; i < observed.size(); ++i)
    out["point_" + std::to_string(i)] = {{"location", {fixed5(observed[i].x), fixed5(observed[i].y)}},
                                         {"vorticity", fixed5(observed[i].value)}};
  return out;
}

void FluidEnvironment::fill_target(PredictionQuery& q, numerics::SeededRng& query_rng) const {
  const double L = solver_.config().L;
  json points = json::array();
  for (std::size_t i = 0; i < solver_.config().query_points; ++i) {
    const double x = numerics::sample_uniform(query_rng, 0.0, L);
    const double y = numerics::sample_uniform(query_rng, 0.0, L);
    points.push_back({x, y});
  }
  q.target = {{"kind", "vorticity"}, {"points", points}};
  q.arity = solver_.config().query_points;
}

std::vector<std::vector<double>> FluidEnvironment::truths(const std::vector<PredictionQuery>& queries) const {
  std::vector<std::vector<double>> out(queries.size());
  fluid::VorticityField future = field_;
  std::int64_t step = step_;
  for (std::size_t k : time_order(queries)) {
    while (step < queries[k].step) solver_.rk4_step(future, ++step);
    std::vector<std::array<double, 2>> points;
    for (const auto& p : queries[k].target.at("points")) points.push_back({p[0].get<double>(), p[1].get<double>()});
    out[k] = fluid::fluid_truth(solver_.to_physical(future), points);
  }
  return out;
}

double FluidEnvironment::score(std::span<const double> prediction, std::span<const double> truth) const {
  return protocol::l2_error(prediction, truth);
}

// ------------------------------------------------------------------ quantum

QuantumEnvironment::QuantumEnvironment(const quantum::QuantumConfig& config, const protocol::CostModel& costs,
                                       std::uint64_t seed)
    : costs_(costs),
      config_(config),
      packets_([&] {
        numerics::SeededRng rng(seed, numerics::Stream::Init);
        return quantum::draw_packets(config, rng);
      }()),
      initial_(quantum::init_wavefunction(config, packets_)),
      psi_(initial_),
      propagator_(config, packets_) {}

json QuantumEnvironment::briefing() const {
  json masses = json::array(), velocities = json::array(), means = json::array(), stds = json::array();
  for (const auto& p : packets_) {
    masses.push_back(fixed5(p.mass));
    velocities.push_back(fixed_list(p.velocity));
    means.push_back(fixed_list(p.mean));
    stds.push_back(fixed_list(p.std));
  }
  json parameters{{"masses", masses},
                  {"velocities", velocities},
                  {"means", means},
                  {"stds", stds},
                  {"box", config_.box},
                  {"domain", config_.domain},
                  {"hbar", config_.hbar},
                  {"dt", config_.dt},
                  {"entangled", config_.lambda_ent > 0.0},
                  {"budget", config_.budget_per_trial},
                  {"num_trials", config_.num_trials},
                  {"max_time", config_.t_max},
                  {"cost", fidelity_table(costs_.cost)},
                  {"noise", fidelity_table(costs_.noise_sigma)}};
  std::string text = interpolate(briefing_template(EnvironmentKind::Quantum),
                                 {{"entanglement", config_.lambda_ent > 0.0 ? "entangled" : "non-entangled"},
                                  {"wall_x", format_fixed(config_.box[0] / 2.0, 2)},
                                  {"wall_y", format_fixed(config_.box[1] / 2.0, 2)},
                                  {"hbar", format_budget(config_.hbar)},
                                  {"masses", masses.dump()},
                                  {"velocities", velocities.dump()},
                                  {"means", means.dump()},
                                  {"stds", stds.dump()},
                                  {"budget", format_budget(config_.budget_per_trial)},
                                  {"max_time", format_budget(config_.t_max)},
                                  {"num_trials", std::to_string(config_.num_trials)},
                                  {"costs", parameters["cost"].dump()},
                                  {"noise", parameters["noise"].dump()}});
  return json{{"text", text}, {"parameters", parameters}};
}

void QuantumEnvironment::validate(const MeasurementRequest& request) const {
  const auto* r = std::get_if<QuantumRequest>(&request);
  if (!r) throw ProtocolError(ErrorCode::Parse, "not a quantum action");
  if (r->particle != 1 && r->particle != 2) throw ProtocolError(ErrorCode::InvalidParticle, "particle must be 1 or 2");
}

void QuantumEnvironment::advance_to_step(std::int64_t step) {
  if (step < step_) throw ArgumentError("QuantumEnvironment: cannot step backwards");
  for (; step_ < step; ++step_) propagator_.step(psi_);
}

json QuantumEnvironment::observe(const MeasurementRequest& request, numerics::SeededRng& noise) {
  const auto& r = std::get<QuantumRequest>(request);
  const auto outcome =
      quantum::measure_and_collapse(psi_, r.particle, r.quality, costs_, noise, config_.p, config_.collapse_width_cells);
  return json{{"particle", r.particle}, {"position", fixed_list(outcome.reported)}};
}

void QuantumEnvironment::reset_trial() {
  psi_ = initial_;
  step_ = 0;
}

void QuantumEnvironment::fill_target(PredictionQuery& q, numerics::SeededRng& query_rng) const {
  const int particle = 1 + static_cast<int>(query_rng.uniform_index(2));
  const double hx = config_.box[0] / 2.0, hy = config_.box[1] / 2.0;
  double x0 = numerics::sample_uniform(query_rng, -hx, hx), x1 = numerics::sample_uniform(query_rng, -hx, hx);
  double y0 = numerics::sample_uniform(query_rng, -hy, hy), y1 = numerics::sample_uniform(query_rng, -hy, hy);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  q.target = {{"kind", "region_probability"},
              {"particle", particle},
              {"region", {{"x_min", x0}, {"x_max", x1}, {"y_min", y0}, {"y_max", y1}}}};
  q.arity = 1;
}

std::vector<std::vector<double>> QuantumEnvironment::truths(const std::vector<PredictionQuery>& queries) const {
  std::vector<std::vector<double>> out(queries.size());
  quantum::JointWavefunction future = initial_;
  std::int64_t step = 0;
  for (std::size_t k : time_order(queries)) {
    for (; step < queries[k].step; ++step) propagator_.step(future);
    const json& region = queries[k].target.at("region");
    const quantum::Region r{region.at("x_min").get<double>(), region.at("x_max").get<double>(),
                            region.at("y_min").get<double>(), region.at("y_max").get<double>()};
    out[k] = {quantum::region_probability(future, queries[k].target.at("particle").get<int>(), r, config_.p)};
  }
  return out;
}

double QuantumEnvironment::score(std::span<const double> prediction, std::span<const double> truth) const {
  return protocol::l2_error(prediction, truth);
}

std::unique_ptr<EpisodeEnvironment> make_environment(const EpisodeConfig& config) {
  config.validate();
  switch (config.environment) {
    case EnvironmentKind::Classical:
      return std::make_unique<ClassicalEnvironment>(
          config.classical, config.cost_model, config.seed,
          config.variant.kind == VariantKind::Visual ? config.variant.image_size : 0,
          config.variant.kind == VariantKind::ParameterInference);
    case EnvironmentKind::Fluid:
      return std::make_unique<FluidEnvironment>(config.fluid, config.cost_model, config.seed);
    case EnvironmentKind::Quantum:
      return std::make_unique<QuantumEnvironment>(config.quantum, config.cost_model, config.seed);
  }
  throw ConfigError("unknown environment");
}

}  // namespace madphys::harness
