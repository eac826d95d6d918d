#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "madphys/numerics/fft.hpp"
#include "madphys/numerics/rng.hpp"
#include "madphys/protocol/fidelity.hpp"

namespace madphys::quantum {

using numerics::Complex;
using numerics::ComplexVector;

/// One Gaussian packet: mass, centre, per-axis width, velocity.
struct PacketParams {
  double mass = 1.0;
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> std{1.0, 1.0};
  std::array<double, 2> velocity{0.0, 0.0};
};

using Range = std::array<double, 2>;

struct QuantumConfig {
  std::size_t n = 32;
  std::array<double, 2> domain{10.0, 10.0};
  std::array<double, 2> box{8.0, 9.0};
  double hbar = 1.0;
  double dt = 0.005;
  double well_height = 1000.0;
  double t_max = 30.0;
  double budget_per_trial = 30.0;
  int num_trials = 5;
  double p = 2.0;
  double lambda_ent = 0.0;
  /// Wall ramp width inside the box edge, in grid spacings.
  double wall_width_cells = 2.0;
  /// Collapse kernel standard deviation, in grid spacings.
  double collapse_width_cells = 1.0;

  std::array<Range, 2> mass_range{Range{0.0, 1.0}, Range{0.0, 5.0}};
  std::array<Range, 2> mean_range{Range{0.0, 4.0}, Range{0.0, 1.0}};
  Range std_range{0.0, 1.0};
  std::array<Range, 2> velocity_range{Range{0.0, 2.0}, Range{0.0, 3.0}};
  /// Fixed packets (skip the random draw when set).
  std::optional<std::array<PacketParams, 2>> packets;

  void validate() const;
  double hx() const noexcept { return domain[0] / static_cast<double>(n); }
  double hy() const noexcept { return domain[1] / static_cast<double>(n); }
};

/// Joint wavefunction on an n^4 grid; index ((i1x * n + i1y) * n + i2x) * n + i2y.
struct JointWavefunction {
  std::size_t n = 0;
  std::array<double, 2> domain{10.0, 10.0};
  ComplexVector values;

  double hx() const noexcept { return domain[0] / static_cast<double>(n); }
  double hy() const noexcept { return domain[1] / static_cast<double>(n); }
  double cell_area() const noexcept { return hx() * hy(); }
  double cell_volume() const noexcept { return cell_area() * cell_area(); }
  /// Cell-centre coordinate along axis 0 (x) or 1 (y).
  double coordinate(int axis, std::size_t i) const noexcept;
  std::size_t index(std::size_t i1x, std::size_t i1y, std::size_t i2x, std::size_t i2y) const noexcept {
    return ((i1x * n + i1y) * n + i2x) * n + i2y;
  }
};

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Region {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

/// Packets drawn from the configured ranges. Widths below two grid spacings
/// are redrawn (up to a bounded number of attempts).
std::array<PacketParams, 2> draw_packets(const QuantumConfig& config, numerics::SeededRng& rng);

/// psi1(r1) psi2(r2) exp(-lambda |r1 - r2|^2), L_p normalized. Each packet
/// carries the momentum phase exp(i m v . r / hbar). Throws InitError when a
/// packet width is below two grid spacings.
JointWavefunction init_wavefunction(const QuantumConfig& config,
                                    const std::array<PacketParams, 2>& packets);

/// sum |psi|^p * h^4
double lp_integral(const JointWavefunction& psi, double p);
/// Scales psi so lp_integral == 1. Throws NormalizationError on a zero field.
void lp_normalize(JointWavefunction& psi, double p);

/// rho_k(r) = sum over the other particle of |psi|^p h^2, on an n x n grid
/// indexed [ix * n + iy]. Sums to 1 when multiplied by h^2.
std::vector<double> marginal_density(const JointWavefunction& psi, int particle, double p);

/// Marginal probability of cells whose centres lie inside `region`.
double region_probability(const JointWavefunction& psi, int particle, const Region& region, double p);

struct CollapseOutcome {
  std::array<std::size_t, 2> cell{};
  std::array<double, 2> center{};
  /// Cell centre plus fidelity noise; the collapse itself ignores the noise.
  std::array<double, 2> reported{};
};

/// Draws a cell for the particle from its L_p marginal, reports it with
/// fidelity noise, multiplies psi by a Gaussian kernel (width
/// collapse_width_cells grid spacings) around the cell centre in that
/// particle's coordinates and renormalizes.
CollapseOutcome measure_and_collapse(JointWavefunction& psi, int particle, protocol::Fidelity fidelity,
                                     const protocol::CostModel& model, numerics::SeededRng& rng,
                                     double p, double collapse_width_cells = 1.0);

/// Strang split-operator propagator with the smoothed square-well potential.
class Propagator {
 public:
  Propagator(const QuantumConfig& config, const std::array<PacketParams, 2>& packets);

  /// One step of size config.dt; renormalizes to the L_p norm unless told not to.
  void step(JointWavefunction& psi, bool renormalize = true) const;

  /// Smoothed single-particle well potential.
  double potential(double x, double y) const;

  /// <H> / <psi|psi> using |psi|^2 weights (the standard p = 2 energy).
  double energy(const JointWavefunction& psi) const;

 private:
  QuantumConfig config_;
  std::array<double, 2> masses_;
  numerics::FftPlan plan_;
  std::vector<Complex> potential_half_;  // n*n, shared by both particles
  std::array<std::vector<Complex>, 2> kinetic_;
  std::vector<double> potential_values_;
  std::array<std::vector<double>, 2> kinetic_energy_;
};

/// Sum |psi|^2 h^4.
double l2_integral(const JointWavefunction& psi);

/// Expected position of one particle under the L_p marginal.
std::array<double, 2> mean_position(const JointWavefunction& psi, int particle, double p);

}  // namespace madphys::quantum
