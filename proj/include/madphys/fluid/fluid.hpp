#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "madphys/numerics/fft.hpp"
#include "madphys/numerics/interp.hpp"
#include "madphys/numerics/rng.hpp"
#include "madphys/protocol/fidelity.hpp"

namespace madphys::fluid {

using numerics::Complex;
using numerics::ComplexVector;
using numerics::RealGrid2D;

enum class ForcingKind { None, VelocityMod, VorticityMod, Combined };

const char* to_string(ForcingKind kind) noexcept;
ForcingKind parse_forcing_kind(std::string_view name);

/// Gyroscopic body force C * (v, -u). The velocity branch uses
/// C = gamma_velocity * sin(beta_velocity |u|^2), the vorticity branch
/// C = gamma_vorticity * cos(beta_vorticity * omega); Combined mixes them as
/// alpha * C_vel + (1 - alpha) * C_vort.
struct Forcing {
  ForcingKind kind = ForcingKind::None;
  double gamma_velocity = 0.5;
  double beta_velocity = 3.0;
  double gamma_vorticity = 5.0;
  double beta_vorticity = std::numbers::pi / 16.0;
  double alpha = 0.5;

  /// False when the coefficient is identically zero.
  bool active() const noexcept;
};

struct FluidConfig {
  std::size_t n = 512;
  double L = 2.0 * std::numbers::pi;
  double nu = 0.001;
  double dt = 0.001;
  double budget = 200.0;
  double t_max = 60.0;
  double dealias_ratio = 2.0 / 3.0;
  Forcing forcing;
  std::array<double, 2> delta_range{0.05, 0.2};
  std::array<double, 2> perturbation_range{0.15, 0.50};
  /// Fixed initial-condition parameters (skip the random draw when set).
  std::optional<double> delta;
  std::optional<double> perturbation_scale;
  std::size_t query_points = 10;

  void validate() const;
};

/// Spectral vorticity on an n x n grid; entry [ix * n + iy] is mode (kx, ky).
struct VorticityField {
  std::size_t n = 0;
  double L = 2.0 * std::numbers::pi;
  ComplexVector spectral;
};

/// Kelvin-Helmholtz parameters actually used to build an initial field.
struct ShearLayer {
  double delta = 0.1;
  double perturbation_scale = 0.3;
};

/// Pseudo-spectral solver for the 2D vorticity equation on a periodic box.
/// Owns FFT plans, wavenumber tables and scratch buffers, so one instance
/// must not be shared between threads.
class FluidSolver {
 public:
  explicit FluidSolver(FluidConfig config);

  const FluidConfig& config() const noexcept { return config_; }
  std::size_t n() const noexcept { return config_.n; }

  /// Wavenumber along one axis for index i.
  double wavenumber(std::size_t i) const noexcept { return k_[i]; }
  /// True when mode (i, j) survives the 2/3 cutoff.
  bool retained(std::size_t i, std::size_t j) const noexcept { return mask_[i * n() + j] != 0; }
  void dealias(ComplexVector& spectral) const;

  /// Spectral field from a physical-space vorticity grid.
  VorticityField from_physical(const RealGrid2D& omega) const;
  /// Double shear layer with a sinusoidal, layer-localized v perturbation.
  VorticityField kelvin_helmholtz(const ShearLayer& shear) const;

  RealGrid2D to_physical(const VorticityField& field) const;
  /// Largest |imag| of the inverse transform (reality check).
  double imaginary_residue(const VorticityField& field) const;

  struct Velocity {
    RealGrid2D u;
    RealGrid2D v;
  };
  Velocity velocity(const VorticityField& field) const;
  /// max |i kx u_hat + i ky v_hat| over all modes.
  double spectral_divergence(const VorticityField& field) const;
  /// 0.5 * integral of |u|^2 over the domain.
  double kinetic_energy(const VorticityField& field) const;
  /// 0.5 * integral of omega^2.
  double enstrophy(const VorticityField& field) const;

  /// Time derivative of the spectral vorticity. Throws NumericalBlowup
  /// (with `step_index`) if non-finite values appear.
  void rhs(const ComplexVector& w_hat, ComplexVector& out, std::int64_t step_index = 0) const;
  /// Classical RK4 step of size config().dt (or `dt` when given).
  void rk4_step(VorticityField& field, std::int64_t step_index = 0,
                std::optional<double> dt = std::nullopt) const;

 private:
  void inverse_real(const ComplexVector& spectral, std::vector<double>& out) const;

  FluidConfig config_;
  numerics::FftPlan plan_;
  std::vector<double> k_;
  std::vector<double> k2_;
  std::vector<unsigned char> mask_;
  mutable ComplexVector work_;
  mutable std::vector<double> u_, v_, wx_, wy_, w_;
  mutable ComplexVector stage_, k1_, k2buf_, k3_, k4_;
};

/// Gyroscopic modulation coefficient on physical grids.
std::vector<double> alien_coefficient(std::span<const double> u, std::span<const double> v,
                                      std::span<const double> omega, const Forcing& forcing);

/// Draws delta and perturbation scale (unless fixed in the config).
ShearLayer draw_shear_layer(const FluidConfig& config, numerics::SeededRng& rng);

struct PointObservation {
  double x;
  double y;
  protocol::Fidelity fidelity;
  double value;
};

/// Bilinearly interpolated vorticity plus fidelity noise at each point.
/// Throws ProtocolError(InvalidCoordinate) on non-finite coordinates.
std::vector<PointObservation> observe_vorticity(
    const RealGrid2D& omega, std::span<const std::pair<std::array<double, 2>, protocol::Fidelity>> points,
    const protocol::CostModel& model, numerics::SeededRng& rng);

/// Noiseless interpolated vorticity at the query points.
std::vector<double> fluid_truth(const RealGrid2D& omega, std::span<const std::array<double, 2>> points);

/// Row-major snapshot: magic "MADV", uint32 n, float64 L, float64 time, then
/// n*n float64 values (little-endian host order).
void write_snapshot(const std::string& path, const RealGrid2D& omega, double time);
RealGrid2D read_snapshot(const std::string& path, double* time = nullptr);

}  // namespace madphys::fluid
