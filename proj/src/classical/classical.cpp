#include "madphys/classical/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "madphys/core/error.hpp"

namespace madphys::classical {

using numerics::sample_gaussian;
using numerics::sample_uniform;

const char* to_string(GravityKind kind) noexcept {
  switch (kind) {
    case GravityKind::InverseSquare: return "inverse_square";
    case GravityKind::InverseLinear: return "inverse_linear";
    case GravityKind::Ripple: return "ripple";
  }
  return "?";
}

GravityKind parse_gravity_kind(std::string_view name) {
  if (name == "inverse_square") return GravityKind::InverseSquare;
  if (name == "inverse_linear") return GravityKind::InverseLinear;
  if (name == "ripple") return GravityKind::Ripple;
  throw ConfigError("unknown gravity law '" + std::string(name) + "'");
}

void ClassicalConfig::validate() const {
  if (n_particles < 1) throw ConfigError("classical: n_particles must be >= 1");
  if (dim != 2 && dim != 3) throw ConfigError("classical: dim must be 2 or 3");
  if (!(dt > 0.0)) throw ConfigError("classical: dt must be positive");
  if (!(budget >= 0.0)) throw ConfigError("classical: budget must be >= 0");
  if (!(t_max > 0.0)) throw ConfigError("classical: t_max must be positive");
  if (!(softening >= 0.0)) throw ConfigError("classical: softening must be >= 0");
  if (!(box_max > box_min)) throw ConfigError("classical: empty box");
  if (!(kappa >= 0.0)) throw ConfigError("classical: kappa must be >= 0");
  if (!(lambda_decay > 0.0)) throw ConfigError("classical: lambda must be > 0");
  if (!(restitution >= 0.0 && restitution <= 1.0))
    throw ConfigError("classical: restitution must lie in [0, 1]");
  if (!(radius_range[0] > 0.0 && radius_range[0] <= radius_range[1]))
    throw ConfigError("classical: invalid radius range");
  if (!(mass_range[0] > 0.0 && mass_range[0] <= mass_range[1]))
    throw ConfigError("classical: invalid mass range");
  if (!(gravity.wavelength > 0.0)) throw ConfigError("classical: ripple wavelength must be > 0");
}

double ClassicalConfig::box_diagonal() const {
  return (box_max - box_min) * std::sqrt(static_cast<double>(dim));
}

ParticleState::ParticleState(std::size_t n_, int dim_)
    : dim(dim_),
      n(n_),
      x(n_ * static_cast<std::size_t>(dim_), 0.0),
      v(n_ * static_cast<std::size_t>(dim_), 0.0),
      mass(n_, 1.0),
      radius(n_, 0.1),
      S(n_ * static_cast<std::size_t>(dim_ * dim_), 0.0),
      a(n_ * static_cast<std::size_t>(dim_), 0.0) {}

SmallVector ParticleState::position(std::size_t i) const {
  SmallVector p{};
  for (int d = 0; d < dim; ++d) p[d] = x[i * dim + d];
  return p;
}

SmallVector ParticleState::velocity(std::size_t i) const {
  SmallVector p{};
  for (int d = 0; d < dim; ++d) p[d] = v[i * dim + d];
  return p;
}

SmallMatrix ParticleState::memory(std::size_t i) const {
  SmallMatrix m(dim);
  const std::size_t base = i * dim * dim;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = S[base + r * dim + c];
  return m;
}

void ParticleState::set_position(std::size_t i, const SmallVector& p) {
  for (int d = 0; d < dim; ++d) x[i * dim + d] = p[d];
}

void ParticleState::set_velocity(std::size_t i, const SmallVector& p) {
  for (int d = 0; d < dim; ++d) v[i * dim + d] = p[d];
}

void ParticleState::set_memory(std::size_t i, const SmallMatrix& m) {
  const std::size_t base = i * dim * dim;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) S[base + r * dim + c] = m(r, c);
}

ParticleState init_classical(const ClassicalConfig& config, numerics::SeededRng& rng) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_particles);
  const int dim = config.dim;
  ParticleState s(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    s.radius[i] = sample_uniform(rng, config.radius_range[0], config.radius_range[1]);
    s.mass[i] = sample_uniform(rng, config.mass_range[0], config.mass_range[1]);
    for (int d = 0; d < dim; ++d)
      s.v[i * dim + d] = sample_gaussian(rng, config.velocity_mean, config.velocity_std);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = config.box_min + s.radius[i];
    const double hi = config.box_max - s.radius[i];
    if (!(hi > lo)) throw InitError("init_classical: particle larger than the box");
    bool placed = false;
    for (int attempt = 0; attempt < config.max_placement_attempts && !placed; ++attempt) {
      for (int d = 0; d < dim; ++d) s.x[i * dim + d] = sample_uniform(rng, lo, hi);
      placed = true;
      for (std::size_t j = 0; j < i && placed; ++j) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double diff = s.x[i * dim + d] - s.x[j * dim + d];
          r2 += diff * diff;
        }
        const double reach = s.radius[i] + s.radius[j];
        if (r2 <= reach * reach) placed = false;
      }
    }
    if (!placed)
      throw InitError("init_classical: could not place particle " + std::to_string(i) +
                      " without overlap (box overcrowded)");
  }
  return s;
}

SmallVector gravity_pair_force(const SmallVector& xi, const SmallVector& xj, double mi, double mj,
                               const GravityLaw& law, double G, double softening, int dim) {
  SmallVector r{};
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    r[d] = xj[d] - xi[d];
    r2 += r[d] * r[d];
  }
  const double rs2 = r2 + softening * softening;
  const double rs = std::sqrt(rs2);
  SmallVector f{};
  if (rs == 0.0) return f;
  double magnitude = 0.0;
  switch (law.kind) {
    case GravityKind::InverseSquare:
      magnitude = G * mi * mj / rs2;
      break;
    case GravityKind::InverseLinear:
      magnitude = G * mi * mj / rs;
      break;
    case GravityKind::Ripple: {
      const double raw = std::sqrt(r2);
      magnitude = G * mi * mj / rs2 *
                  (1.0 + law.amplitude *
                             std::sin(2.0 * std::numbers::pi * raw / law.wavelength + law.phase));
      break;
    }
  }
  for (int d = 0; d < dim; ++d) f[d] = magnitude * r[d] / rs;
  return f;
}

MassTensor mass_tensor(double m0, double kappa, const SmallMatrix& S) {
  if (!(m0 > 0.0)) throw ArgumentError("mass_tensor: m0 must be positive");
  SmallMatrix M(S.dim);
  for (int r = 0; r < S.dim; ++r)
    for (int c = 0; c < S.dim; ++c) M(r, c) = (r == c ? m0 : 0.0) + kappa * S(r, c);
  return {M, numerics::invert_small_matrix(M)};
}

std::vector<double> net_forces(const ParticleState& state, const ClassicalConfig& config) {
  const int dim = state.dim;
  std::vector<double> F(state.n * dim, 0.0);
  for (std::size_t i = 0; i < state.n; ++i) {
    const SmallVector xi = state.position(i);
    for (std::size_t j = i + 1; j < state.n; ++j) {
      const SmallVector f = gravity_pair_force(xi, state.position(j), state.mass[i], state.mass[j],
                                               config.gravity, config.G, config.softening, dim);
      for (int d = 0; d < dim; ++d) {
        F[i * dim + d] += f[d];
        F[j * dim + d] -= f[d];
      }
    }
  }
  return F;
}

void resolve_collisions(ParticleState& state, const ClassicalConfig& config) {
  const int dim = state.dim;
  const double e = config.restitution;
  for (std::size_t i = 0; i < state.n; ++i) {
    const double lo = config.box_min + state.radius[i];
    const double hi = config.box_max - state.radius[i];
    for (int d = 0; d < dim; ++d) {
      double& x = state.x[i * dim + d];
      double& v = state.v[i * dim + d];
      if (x > hi) {
        x = std::max(lo, 2.0 * hi - x);
        if (v > 0.0) v = -e * v;
      } else if (x < lo) {
        x = std::min(hi, 2.0 * lo - x);
        if (v < 0.0) v = -e * v;
      }
    }
  }

  for (std::size_t i = 0; i < state.n; ++i) {
    for (std::size_t j = i + 1; j < state.n; ++j) {
      SmallVector d{};
      double dist2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        d[k] = state.x[j * dim + k] - state.x[i * dim + k];
        dist2 += d[k] * d[k];
      }
      const double reach = state.radius[i] + state.radius[j];
      if (dist2 >= reach * reach) continue;
      const double dist = std::sqrt(dist2);
      SmallVector normal{};
      if (dist > 0.0) {
        for (int k = 0; k < dim; ++k) normal[k] = d[k] / dist;
      } else {
        normal[0] = 1.0;
      }
      const double inv_i = 1.0 / state.mass[i];
      const double inv_j = 1.0 / state.mass[j];
      double vn = 0.0;
      for (int k = 0; k < dim; ++k) vn += (state.v[j * dim + k] - state.v[i * dim + k]) * normal[k];
      if (vn < 0.0) {
        const double impulse = (1.0 + e) * vn / (inv_i + inv_j);
        for (int k = 0; k < dim; ++k) {
          state.v[i * dim + k] += impulse * inv_i * normal[k];
          state.v[j * dim + k] -= impulse * inv_j * normal[k];
        }
      }
      const double penetration = reach - dist;
      const double share_i = inv_i / (inv_i + inv_j);
      const double share_j = inv_j / (inv_i + inv_j);
      for (int k = 0; k < dim; ++k) {
        state.x[i * dim + k] -= penetration * share_i * normal[k];
        state.x[j * dim + k] += penetration * share_j * normal[k];
      }
    }
  }
}

void step_classical(ParticleState& state, const ClassicalConfig& config, std::int64_t step_index) {
  const int dim = state.dim;
  const double dt = config.dt;
  const std::vector<double> F = net_forces(state, config);
  for (std::size_t i = 0; i < state.n; ++i) {
    const SmallMatrix S = state.memory(i);
    const MassTensor mt = mass_tensor(state.mass[i], config.kappa, S);
    SmallVector f{};
    for (int d = 0; d < dim; ++d) f[d] = F[i * dim + d];
    const SmallVector acc = numerics::solve_small_system(mt.M, f);
    SmallMatrix next(dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        next(r, c) = S(r, c) + dt * (-config.lambda_decay * S(r, c) + acc[r] * acc[c]);
    state.set_memory(i, next);
    for (int d = 0; d < dim; ++d) {
      state.a[i * dim + d] = acc[d];
      state.v[i * dim + d] += dt * acc[d];
      state.x[i * dim + d] += dt * state.v[i * dim + d];
    }
  }
  resolve_collisions(state, config);
  for (double value : state.x)
    if (!std::isfinite(value)) throw NumericalBlowup("classical state became non-finite", step_index);
  for (double value : state.v)
    if (!std::isfinite(value)) throw NumericalBlowup("classical state became non-finite", step_index);
}

double kinetic_energy(const ParticleState& state) {
  double e = 0.0;
  for (std::size_t i = 0; i < state.n; ++i) {
    double v2 = 0.0;
    for (int d = 0; d < state.dim; ++d) v2 += state.v[i * state.dim + d] * state.v[i * state.dim + d];
    e += 0.5 * state.mass[i] * v2;
  }
  return e;
}

std::vector<double> classical_truth(const ParticleState& state) { return state.x; }

std::vector<PositionObservation> observe_positions(
    const ParticleState& state, std::span<const std::pair<std::size_t, protocol::Fidelity>> selection,
    const protocol::CostModel& model, numerics::SeededRng& rng) {
  if (selection.empty()) throw ProtocolError(ErrorCode::EmptySelection, "empty selection");
  std::set<std::size_t> seen;
  for (const auto& [id, fid] : selection) {
    if (id >= state.n)
      throw ProtocolError(ErrorCode::InvalidObject,
                          "invalid object: object_id " + std::to_string(id) + " does not exist");
    if (!seen.insert(id).second)
      throw ProtocolError(ErrorCode::DuplicateObject,
                          "object_id " + std::to_string(id) + " selected twice");
  }
  std::vector<PositionObservation> out;
  out.reserve(selection.size());
  for (const auto& [id, fid] : selection) {
    PositionObservation obs{id, fid, {}};
    for (int d = 0; d < state.dim; ++d)
      obs.position[d] = numerics::sample_gaussian(rng, state.x[id * state.dim + d], model.sigma(fid));
    out.push_back(obs);
  }
  return out;
}

ClassicalSimulation::ClassicalSimulation(ClassicalConfig config, ParticleState initial)
    : config_(std::move(config)), state_(std::move(initial)), clock_(config_.dt, config_.t_max) {
  config_.validate();
  if (state_.dim != config_.dim || state_.n != static_cast<std::size_t>(config_.n_particles))
    throw ConfigError("ClassicalSimulation: state does not match config");
}

void ClassicalSimulation::advance_to_step(std::int64_t step) {
  if (step < clock_.step_count()) throw ArgumentError("ClassicalSimulation: cannot rewind");
  for (std::int64_t k = clock_.step_count(); k < step; ++k) step_classical(state_, config_, k + 1);
  clock_ = clock_.at_step(step);
}

}  // namespace madphys::classical
