#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "madphys/numerics/rng.hpp"
#include "madphys/numerics/small_matrix.hpp"
#include "madphys/protocol/clock.hpp"
#include "madphys/protocol/fidelity.hpp"

namespace madphys::classical {

using numerics::SmallMatrix;
using numerics::SmallVector;

enum class GravityKind { InverseSquare, InverseLinear, Ripple };

struct GravityLaw {
  GravityKind kind = GravityKind::InverseSquare;
  double amplitude = 1.0;    // A
  double wavelength = 10.0;  // lambda_g
  double phase = 0.0;        // phi
};

const char* to_string(GravityKind kind) noexcept;
GravityKind parse_gravity_kind(std::string_view name);

/// Classical N-body settings; defaults are the benchmark's standard values.
struct ClassicalConfig {
  int n_particles = 3;
  int dim = 2;
  double dt = 0.001;
  double budget = 200.0;
  double G = 1.0;
  double restitution = 1.0;
  double t_max = 300.0;
  double softening = 1e-4;
  double box_min = -10.0;  // per axis
  double box_max = 10.0;
  double kappa = 0.0;
  double lambda_decay = 1.0;
  GravityLaw gravity;
  std::array<double, 2> radius_range{0.1, 0.5};
  std::array<double, 2> mass_range{0.5, 5.0};
  double velocity_mean = 0.0;
  double velocity_std = 1.0;
  int max_placement_attempts = 10000;

  /// Throws ConfigError on invalid values.
  void validate() const;
  double box_diagonal() const;
};

/// Particle system state. Vectors are flat: component d of particle i lives
/// at [i * dim + d]; memory tensor entry (r, c) at [i * dim * dim + r * dim + c].
struct ParticleState {
  int dim = 2;
  std::size_t n = 0;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> mass;
  std::vector<double> radius;
  std::vector<double> S;
  std::vector<double> a;

  ParticleState() = default;
  ParticleState(std::size_t n, int dim);

  SmallVector position(std::size_t i) const;
  SmallVector velocity(std::size_t i) const;
  SmallMatrix memory(std::size_t i) const;
  void set_position(std::size_t i, const SmallVector& p);
  void set_velocity(std::size_t i, const SmallVector& p);
  void set_memory(std::size_t i, const SmallMatrix& m);
};

/// Random initial state: radii, masses and velocities from the configured
/// distributions, then rejection-sampled non-overlapping positions inside
/// the box. Draw order: per particle (radius, mass, velocity components),
/// then positions.
ParticleState init_classical(const ClassicalConfig& config, numerics::SeededRng& rng);

/// Gravitational force on particle i from particle j. Every denominator uses
/// the softened distance sqrt(r^2 + eps^2); the ripple phase uses raw r.
SmallVector gravity_pair_force(const SmallVector& xi, const SmallVector& xj, double mi, double mj,
                               const GravityLaw& law, double G, double softening, int dim);

struct MassTensor {
  SmallMatrix M;
  SmallMatrix inverse;
};

/// M = m0 I + kappa S and its inverse.
MassTensor mass_tensor(double m0, double kappa, const SmallMatrix& S);

/// Net gravitational force on every particle (flat, n * dim).
std::vector<double> net_forces(const ParticleState& state, const ClassicalConfig& config);

/// Wall reflection and elastic pair impulses (scalar masses).
void resolve_collisions(ParticleState& state, const ClassicalConfig& config);

/// One semi-implicit Euler step: forces, a = M^-1 F with the previous S,
/// S += dt (-lambda S + a a^T), v += dt a, x += dt v, collisions.
/// Throws NumericalBlowup carrying `step_index` on non-finite state.
void step_classical(ParticleState& state, const ClassicalConfig& config,
                    std::int64_t step_index = 0);

/// Total kinetic energy using scalar masses.
double kinetic_energy(const ParticleState& state);

/// Flat positions of all particles (the prediction target).
std::vector<double> classical_truth(const ParticleState& state);

struct PositionObservation {
  std::size_t object_id;
  protocol::Fidelity fidelity;
  SmallVector position;
};

/// Noisy positions of the selected objects; the state is not modified.
/// Throws ProtocolError(InvalidObject / DuplicateObject / EmptySelection).
std::vector<PositionObservation> observe_positions(
    const ParticleState& state, std::span<const std::pair<std::size_t, protocol::Fidelity>> selection,
    const protocol::CostModel& model, numerics::SeededRng& rng);

/// State plus clock; advances in whole integration steps.
class ClassicalSimulation {
 public:
  ClassicalSimulation(ClassicalConfig config, ParticleState initial);

  const ClassicalConfig& config() const noexcept { return config_; }
  const ParticleState& state() const noexcept { return state_; }
  const protocol::Clock& clock() const noexcept { return clock_; }
  double time() const noexcept { return clock_.time(); }

  void advance_to_step(std::int64_t step);

 private:
  ClassicalConfig config_;
  ParticleState state_;
  protocol::Clock clock_;
};

}  // namespace madphys::classical
