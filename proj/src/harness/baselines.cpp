#include "madphys/harness/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "madphys/core/error.hpp"

namespace madphys::harness {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_value(const json& v) { return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>(); }

std::vector<double> parse_values(const json& array) {
  std::vector<double> out;
  for (const auto& v : array) out.push_back(parse_value(v));
  return out;
}

// Largest multiple of dt not above `span` (at least one step).
double quantize_down(double span, double dt) { return dt * std::max(1.0, std::floor(span / dt + 1e-9)); }

std::string finish_message() { return json{{"finish", true}}.dump(); }

}  // namespace

std::vector<double> const_accel_predict(std::span<const double> times, std::span<const std::vector<double>> values,
                                        double t) {
  if (times.size() != values.size() || times.empty())
    throw ArgumentError("const_accel_predict: need matching, non-empty samples");
  const std::size_t n = times.size();
  if (n < 3) return linear_predict(times, values, t);
  const double t0 = times[n - 3], t1 = times[n - 2], t2 = times[n - 1];
  const auto& y0 = values[n - 3];
  const auto& y1 = values[n - 2];
  const auto& y2 = values[n - 1];
  // Lagrange basis of the quadratic through the three samples.
  const double l0 = (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1));
  std::vector<double> out(y2.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = l0 * y0[k] + l1 * y1[k] + l2 * y2[k];
  return out;
}

std::vector<double> linear_predict(std::span<const double> times, std::span<const std::vector<double>> values,
                                   double t) {
  if (times.size() != values.size() || times.empty())
    throw ArgumentError("linear_predict: need matching, non-empty samples");
  const std::size_t n = times.size();
  if (n == 1) return values[0];
  const double t0 = times[n - 2], t1 = times[n - 1];
  const auto& y0 = values[n - 2];
  const auto& y1 = values[n - 1];
  std::vector<double> out(y1.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = y1[k] + (y1[k] - y0[k]) * (t - t1) / (t1 - t0);
  return out;
}

double trajectory_residual(const classical::ClassicalConfig& config, const classical::ParticleState& initial,
                           std::span<const TimedPositions> observations) {
  std::vector<const TimedPositions*> ordered;
  for (const auto& o : observations) ordered.push_back(&o);
  std::stable_sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->step < b->step; });
  classical::ClassicalSimulation sim(config, initial);
  double sum = 0.0;
  std::size_t count = 0;
  try {
    for (const auto* o : ordered) {
      sim.advance_to_step(o->step);
      const auto& x = sim.state().x;
      for (std::size_t k = 0; k < o->positions.size() && k < x.size(); ++k) {
        if (std::isnan(o->positions[k])) continue;
        const double d = x[k] - o->positions[k];
        sum += d * d;
        ++count;
      }
    }
  } catch (const NumericalBlowup&) {
    return std::numeric_limits<double>::infinity();
  }
  return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

LawFit fit_gravity_law(const classical::ClassicalConfig& config, const classical::ParticleState& initial,
                       std::span<const TimedPositions> observations,
                       std::span<const classical::GravityKind> candidates) {
  static constexpr std::array<classical::GravityKind, 3> kAll{
      classical::GravityKind::InverseSquare, classical::GravityKind::InverseLinear, classical::GravityKind::Ripple};
  if (candidates.empty()) candidates = kAll;
  LawFit best;
  best.residual = std::numeric_limits<double>::infinity();
  for (auto kind : candidates) {
    classical::ClassicalConfig trial = config;
    trial.gravity = classical::GravityLaw{};
    trial.gravity.kind = kind;
    const double r = trajectory_residual(trial, initial, observations);
    best.residuals.push_back(r);
    if (r < best.residual) {
      best.residual = r;
      best.kind = kind;
    }
  }
  return best;
}

KappaFit fit_kappa(const classical::ClassicalConfig& config, const classical::ParticleState& initial,
                   std::span<const TimedPositions> observations, double kappa_max) {
  if (!(kappa_max > 0.0)) throw ArgumentError("fit_kappa: kappa_max must be positive");
  auto residual = [&](double kappa) {
    classical::ClassicalConfig trial = config;
    trial.kappa = kappa;
    return trajectory_residual(trial, initial, observations);
  };
  constexpr int kGrid = 13;
  std::vector<double> grid(kGrid), values(kGrid);
  std::size_t best = 0;
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = kappa_max * i / (kGrid - 1);
    values[i] = residual(grid[i]);
    if (values[i] < values[best]) best = static_cast<std::size_t>(i);
  }
  KappaFit fit{grid[best], values[best]};
  double lo = grid[best > 0 ? best - 1 : 0];
  double hi = grid[std::min<std::size_t>(best + 1, kGrid - 1)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - ratio * (hi - lo), b = lo + ratio * (hi - lo);
  double fa = residual(a), fb = residual(b);
  for (int it = 0; it < 25; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = residual(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = residual(b);
    }
  }
  if (fa < fit.residual) fit = {a, fa};
  if (fb < fit.residual) fit = {b, fb};
  return fit;
}

const char* to_string(BaselinePolicy policy) noexcept {
  switch (policy) {
    case BaselinePolicy::Random: return "random";
    case BaselinePolicy::Grid: return "grid";
    case BaselinePolicy::ModelFit: return "model_fit";
    case BaselinePolicy::ConstAccel: return "const_accel";
  }
  return "unknown";
}

BaselinePolicy parse_baseline_policy(std::string_view name) {
  if (name == "random") return BaselinePolicy::Random;
  if (name == "grid") return BaselinePolicy::Grid;
  if (name == "model_fit") return BaselinePolicy::ModelFit;
  if (name == "const_accel") return BaselinePolicy::ConstAccel;
  throw ConfigError("unknown baseline policy '" + std::string(name) + "'");
}

BaselineAgent::BaselineAgent(BaselinePolicy policy, std::uint64_t seed)
    : policy_(policy), seed_(seed), rng_(seed, numerics::Stream::Agent) {}

void BaselineAgent::reset() {
  briefing_ = nullptr;
  params_ = nullptr;
  samples_.clear();
  kappa_estimate_.reset();
  fitted_law_.reset();
  time_ = 0.0;
  trial_ = 0;
  actions_taken_ = 0;
}

std::optional<std::string> BaselineAgent::respond(const json& envelope) {
  const std::string type = envelope.at("type").get<std::string>();
  const json& payload = envelope.at("payload");
  if (type == "briefing") {
    on_briefing(payload);
    return next_action();
  }
  if (type == "observation" || type == "error") {
    on_observation(payload);
    if (type == "error" && payload.value("code", "") == "insufficient_budget") return finish_message();
    return next_action();
  }
  if (type == "prediction_query") {
    if (payload.contains("notice") && payload["notice"].contains("final_observation"))
      on_observation(payload["notice"]["final_observation"]);
    return answer(payload);
  }
  return std::nullopt;
}

void BaselineAgent::on_briefing(const json& payload) {
  briefing_ = payload;
  params_ = payload.at("parameters");
  kind_ = parse_environment_kind(payload.at("environment").get<std::string>());
  budget_ = payload.at("budget_remaining").get<double>();
  t_max_ = params_.at("max_time").get<double>();
  dt_ = params_.at("dt").get<double>();
  time_ = 0.0;
  if (payload.contains("initial_observation") && payload["initial_observation"].contains("observation"))
    samples_.push_back({0.0, 0, 0, payload["initial_observation"]["observation"]});
}

void BaselineAgent::on_observation(const json& payload) {
  if (payload.contains("observation") && !payload["observation"].is_null() &&
      !payload["observation"].contains("image_png_base64"))
    samples_.push_back({payload.at("time").get<double>(), payload.value("step", std::int64_t{0}),
                        payload.value("trial", 0), payload["observation"]});
  if (payload.contains("observation") && !payload["observation"].is_null()) ++actions_taken_;
  if (payload.contains("time")) time_ = payload["time"].get<double>();
  if (payload.contains("budget_remaining")) budget_ = payload["budget_remaining"].get<double>();
  if (payload.contains("trial_ended")) {
    trial_ = payload["trial_ended"].at("next_trial").get<int>();
    time_ = 0.0;
    budget_ = params_.at("budget").get<double>();
    actions_taken_ = 0;
  }
}

std::string BaselineAgent::next_action() {
  if (t_max_ - time_ < dt_ * 0.5) return finish_message();
  return policy_ == BaselinePolicy::Random ? random_action() : scheduled_action();
}

std::string BaselineAgent::random_action() {
  const json& cost = params_.at("cost");
  const double low = cost.at("low").get<double>();
  if (budget_ < low) return finish_message();
  static constexpr std::array<const char*, 3> kQualities{"low", "medium", "high"};
  const double max_delta = std::max(dt_, std::min(t_max_ - time_, t_max_ / 10.0));
  const double delta = std::max(dt_, quantize_down(numerics::sample_uniform(rng_, dt_, max_delta), dt_));
  json action;
  if (kind_ == EnvironmentKind::Quantum) {
    std::string quality = kQualities[rng_.uniform_index(3)];
    while (cost.at(quality).get<double>() > budget_) quality = "low";
    return json{{"particle", 1 + static_cast<int>(rng_.uniform_index(2))}, {"time_delta", delta}, {"quality", quality}}
        .dump();
  }
  json selection = json::array();
  double total = 0.0;
  if (kind_ == EnvironmentKind::Classical) {
    const std::size_t n = params_.at("num_objects").get<std::size_t>();
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(ids[i - 1], ids[rng_.uniform_index(i)]);
    const std::size_t k = 1 + rng_.uniform_index(n);
    for (std::size_t i = 0; i < k; ++i) {
      std::string quality = kQualities[rng_.uniform_index(3)];
      if (total + cost.at(quality).get<double>() > budget_) quality = "low";
      if (total + low > budget_) break;
      total += cost.at(quality).get<double>();
      selection.push_back({{"object_id", ids[i]}, {"quality", quality}});
    }
  } else {
    const double L = params_.at("L").get<double>();
    const std::size_t k = 1 + rng_.uniform_index(4);
    for (std::size_t i = 0; i < k; ++i) {
      std::string quality = kQualities[rng_.uniform_index(3)];
      if (total + cost.at(quality).get<double>() > budget_) quality = "low";
      if (total + low > budget_) break;
      total += cost.at(quality).get<double>();
      const double x = numerics::sample_uniform(rng_, 0.0, L);
      const double y = numerics::sample_uniform(rng_, 0.0, L);
      selection.push_back({{"x", x}, {"y", y}, {"quality", quality}});
    }
  }
  return json{{"selection", selection}, {"time_delta", delta}}.dump();
}

namespace {

// Fixed observation lattice for the fluid schedule.
std::vector<std::array<double, 2>> fluid_lattice(std::size_t m, double L) {
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  std::vector<std::array<double, 2>> out;
  for (std::size_t j = 0; j < m; ++j)
    out.push_back({(static_cast<double>(j % side) + 0.5) * L / side, (static_cast<double>(j / side) + 0.5) * L / side});
  return out;
}

std::size_t lattice_size(double budget, double high_cost) {
  return static_cast<std::size_t>(std::clamp(std::floor(budget / (5.0 * high_cost)), 1.0, 4.0));
}

}  // namespace

std::string BaselineAgent::scheduled_action() {
  const json& cost = params_.at("cost");
  const double high = cost.at("high").get<double>();
  const double low = cost.at("low").get<double>();
  const double total_budget = params_.at("budget").get<double>();
  if (budget_ < low) return finish_message();

  std::size_t items = 1;
  if (kind_ == EnvironmentKind::Classical) items = params_.at("num_objects").get<std::size_t>();
  if (kind_ == EnvironmentKind::Fluid) items = lattice_size(total_budget, high);
  const double per_action = static_cast<double>(items) * high;
  const int planned = std::max(1, static_cast<int>(std::floor(total_budget / per_action)));

  double delta = quantize_down(t_max_ / planned, dt_);
  if (policy_ == BaselinePolicy::ConstAccel && kind_ != EnvironmentKind::Quantum) {
    // Cluster the observations at the end of the window.
    const double spacing = quantize_down(std::min(1.0, t_max_ / (2.0 * planned)), dt_);
    const double first = t_max_ - (planned - 1) * spacing;
    delta = actions_taken_ == 0 ? quantize_down(first - time_, dt_) : spacing;
  }
  delta = std::min(delta, quantize_down(t_max_ - time_, dt_));

  // Highest uniform quality that fits the remaining budget.
  std::string quality = "high";
  std::size_t affordable = items;
  for (const char* q : {"high", "medium", "low"}) {
    quality = q;
    affordable = static_cast<std::size_t>(std::floor(budget_ / cost.at(q).get<double>()));
    if (affordable >= items) break;
  }
  affordable = std::max<std::size_t>(1, std::min(affordable, items));

  if (kind_ == EnvironmentKind::Quantum) {
    const int particle = 1 + (actions_taken_ + trial_) % 2;
    return json{{"particle", particle}, {"time_delta", delta}, {"quality", quality}}.dump();
  }
  json selection = json::array();
  if (kind_ == EnvironmentKind::Classical) {
    for (std::size_t i = 0; i < affordable; ++i) selection.push_back({{"object_id", i}, {"quality", quality}});
  } else {
    const auto lattice = fluid_lattice(items, params_.at("L").get<double>());
    for (std::size_t i = 0; i < affordable; ++i)
      selection.push_back({{"x", lattice[i][0]}, {"y", lattice[i][1]}, {"quality", quality}});
  }
  return json{{"selection", selection}, {"time_delta", delta}}.dump();
}

std::string BaselineAgent::answer(const json& query) {
  const std::size_t arity = query.at("arity").get<std::size_t>();
  std::vector<double> values(arity, 0.0);
  if (policy_ != BaselinePolicy::Random) {
    const std::string kind = query.at("target").at("kind").get<std::string>();
    if (kind == "positions") values = answer_classical(query);
    else if (kind == "vorticity") values = answer_fluid(query);
    else if (kind == "region_probability") values = answer_quantum(query);
    else if (kind == "parameter") values = {estimate_kappa()};
  }
  if (values.size() != arity) values.assign(arity, 0.0);
  for (auto& v : values)
    if (!std::isfinite(v)) v = 0.0;
  json out{{"predictions", values}};
  if (query.at("index").get<int>() == 0) {
    std::string description = std::string("baseline ") + to_string(policy_);
    if (fitted_law_) description += "; gravity law " + std::string(classical::to_string(*fitted_law_));
    out["law_description"] = description;
  }
  return out.dump();
}

std::optional<classical::ParticleState> BaselineAgent::briefed_state() const {
  if (!briefing_.contains("initial_observation") || !briefing_["initial_observation"].contains("observation"))
    return std::nullopt;
  const std::size_t n = params_.at("num_objects").get<std::size_t>();
  const int dim = params_.at("dim").get<int>();
  classical::ParticleState state(n, dim);
  const auto masses = parse_values(params_.at("masses"));
  const auto radii = parse_values(params_.at("radii"));
  const json& obs = briefing_["initial_observation"]["observation"];
  for (std::size_t i = 0; i < n; ++i) {
    state.mass[i] = masses[i];
    state.radius[i] = radii[i];
    const auto v = parse_values(params_.at("velocities")[i]);
    const auto x = parse_values(obs.at("object_" + std::to_string(i)).at("position"));
    for (int d = 0; d < dim; ++d) {
      state.v[i * dim + d] = v[d];
      state.x[i * dim + d] = x[d];
    }
  }
  return state;
}

classical::ClassicalConfig BaselineAgent::briefed_config() const {
  classical::ClassicalConfig c;
  c.n_particles = params_.at("num_objects").get<int>();
  c.dim = params_.at("dim").get<int>();
  c.G = params_.at("G").get<double>();
  c.box_min = params_.at("box_min")[0].get<double>();
  c.box_max = params_.at("box_max")[0].get<double>();
  c.dt = dt_;
  c.t_max = t_max_;
  c.softening = params_.value("softening", c.softening);
  c.restitution = params_.value("restitution", c.restitution);
  c.lambda_decay = params_.value("lambda_decay", c.lambda_decay);
  if (params_.contains("gravity")) c.gravity.kind = classical::parse_gravity_kind(params_["gravity"].get<std::string>());
  return c;
}

std::vector<TimedPositions> BaselineAgent::classical_observations() const {
  const std::size_t n = params_.at("num_objects").get<std::size_t>();
  const std::size_t dim = params_.at("dim").get<std::size_t>();
  std::vector<TimedPositions> out;
  for (const auto& s : samples_) {
    TimedPositions tp{s.step, std::vector<double>(n * dim, kNaN)};
    for (std::size_t i = 0; i < n; ++i) {
      const std::string key = "object_" + std::to_string(i);
      if (!s.observation.contains(key)) continue;
      const auto x = parse_values(s.observation[key].at("position"));
      for (std::size_t d = 0; d < dim; ++d) tp.positions[i * dim + d] = x[d];
    }
    out.push_back(std::move(tp));
  }
  return out;
}

std::vector<double> BaselineAgent::answer_classical(const json& query) {
  const std::size_t n = params_.at("num_objects").get<std::size_t>();
  const std::size_t dim = params_.at("dim").get<std::size_t>();
  const double t = query.at("query_time").get<double>();
  if (policy_ == BaselinePolicy::ModelFit) {
    if (auto initial = briefed_state()) {
      classical::ClassicalConfig config = briefed_config();
      const auto observations = classical_observations();
      if (!fitted_law_) fitted_law_ = fit_gravity_law(config, *initial, observations).kind;
      config.gravity.kind = *fitted_law_;
      try {
        classical::ClassicalSimulation sim(config, *initial);
        sim.advance_to_step(std::llround(t / dt_));
        return classical::classical_truth(sim.state());
      } catch (const NumericalBlowup&) {
      }
    }
  }
  std::vector<double> out(n * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> times;
    std::vector<std::vector<double>> series;
    const std::string key = "object_" + std::to_string(i);
    for (const auto& s : samples_) {
      if (!s.observation.contains(key)) continue;
      times.push_back(s.time);
      series.push_back(parse_values(s.observation[key].at("position")));
    }
    if (times.empty()) continue;
    const auto p = policy_ == BaselinePolicy::ConstAccel ? const_accel_predict(times, series, t)
                                                         : linear_predict(times, series, t);
    for (std::size_t d = 0; d < dim; ++d) out[i * dim + d] = p[d];
  }
  return out;
}

std::vector<double> BaselineAgent::answer_fluid(const json& query) {
  const double L = params_.at("L").get<double>();
  const double t = query.at("query_time").get<double>();
  const auto lattice = fluid_lattice(lattice_size(params_.at("budget").get<double>(),
                                                  params_.at("cost").at("high").get<double>()),
                                     L);
  // Per lattice point: observed series (matching by location).
  std::vector<std::vector<double>> times(lattice.size());
  std::vector<std::vector<std::vector<double>>> series(lattice.size());
  for (const auto& s : samples_)
    for (const auto& [key, point] : s.observation.items()) {
      const auto loc = parse_values(point.at("location"));
      for (std::size_t j = 0; j < lattice.size(); ++j)
        if (std::abs(loc[0] - lattice[j][0]) < 1e-4 && std::abs(loc[1] - lattice[j][1]) < 1e-4) {
          times[j].push_back(s.time);
          series[j].push_back({parse_value(point.at("vorticity"))});
        }
    }
  std::vector<double> out;
  for (const auto& p : query.at("target").at("points")) {
    const double x = p[0].get<double>(), y = p[1].get<double>();
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lattice.size(); ++j) {
      if (times[j].empty()) continue;
      double dx = std::abs(x - lattice[j][0]), dy = std::abs(y - lattice[j][1]);
      dx = std::min(dx, L - dx);
      dy = std::min(dy, L - dy);
      if (dx * dx + dy * dy < best) {
        best = dx * dx + dy * dy;
        nearest = j;
      }
    }
    if (!std::isfinite(best)) {
      out.push_back(0.0);
      continue;
    }
    const auto v = policy_ == BaselinePolicy::ConstAccel ? const_accel_predict(times[nearest], series[nearest], t)
                                                         : linear_predict(times[nearest], series[nearest], t);
    out.push_back(v[0]);
  }
  return out;
}

std::vector<double> BaselineAgent::answer_quantum(const json& query) {
  // Empirical frequency of the particle inside the region over all trials.
  const json& target = query.at("target");
  const int particle = target.at("particle").get<int>();
  const json& region = target.at("region");
  const double x0 = region.at("x_min").get<double>(), x1 = region.at("x_max").get<double>();
  const double y0 = region.at("y_min").get<double>(), y1 = region.at("y_max").get<double>();
  int inside = 0, total = 0;
  for (const auto& s : samples_) {
    if (s.observation.value("particle", 0) != particle) continue;
    const auto pos = parse_values(s.observation.at("position"));
    ++total;
    if (pos[0] >= x0 && pos[0] <= x1 && pos[1] >= y0 && pos[1] <= y1) ++inside;
  }
  if (total == 0) {
    const auto box = params_.at("box").get<std::array<double, 2>>();
    return {(x1 - x0) * (y1 - y0) / (box[0] * box[1])};
  }
  return {static_cast<double>(inside) / total};
}

double BaselineAgent::estimate_kappa() {
  if (kappa_estimate_) return *kappa_estimate_;
  double estimate = 0.0;
  if (policy_ == BaselinePolicy::ModelFit) {
    if (auto initial = briefed_state()) estimate = fit_kappa(briefed_config(), *initial, classical_observations()).kappa;
  }
  kappa_estimate_ = estimate;
  return estimate;
}

std::unique_ptr<Agent> make_baseline(BaselinePolicy policy, std::uint64_t seed) {
  return std::make_unique<BaselineAgent>(policy, seed);
}

}  // namespace madphys::harness
