#include "madphys/fluid/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "madphys/core/error.hpp"

namespace madphys::fluid {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

const char* to_string(ForcingKind kind) noexcept {
  switch (kind) {
    case ForcingKind::None: return "none";
    case ForcingKind::VelocityMod: return "velocity";
    case ForcingKind::VorticityMod: return "vorticity";
    case ForcingKind::Combined: return "combined";
  }
  return "?";
}

ForcingKind parse_forcing_kind(std::string_view name) {
  if (name == "none") return ForcingKind::None;
  if (name == "velocity") return ForcingKind::VelocityMod;
  if (name == "vorticity") return ForcingKind::VorticityMod;
  if (name == "combined") return ForcingKind::Combined;
  throw ConfigError("unknown forcing kind '" + std::string(name) + "'");
}

bool Forcing::active() const noexcept {
  switch (kind) {
    case ForcingKind::None: return false;
    case ForcingKind::VelocityMod: return gamma_velocity != 0.0;
    case ForcingKind::VorticityMod: return gamma_vorticity != 0.0;
    case ForcingKind::Combined:
      return (alpha != 0.0 && gamma_velocity != 0.0) || (alpha != 1.0 && gamma_vorticity != 0.0);
  }
  return false;
}

void FluidConfig::validate() const {
  if (!numerics::fft_size_supported(n) || n < 4)
    throw ConfigError("fluid: n must be a power of two >= 4");
  if (!(L > 0.0)) throw ConfigError("fluid: L must be positive");
  if (!(nu >= 0.0)) throw ConfigError("fluid: nu must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("fluid: dt must be positive");
  if (!(t_max > 0.0)) throw ConfigError("fluid: t_max must be positive");
  if (!(dealias_ratio > 0.0 && dealias_ratio <= 1.0))
    throw ConfigError("fluid: dealias ratio must lie in (0, 1]");
  if (!(forcing.alpha >= 0.0 && forcing.alpha <= 1.0))
    throw ConfigError("fluid: combination coefficient must lie in [0, 1]");
  if (!(delta_range[0] > 0.0 && delta_range[0] <= delta_range[1]))
    throw ConfigError("fluid: invalid delta range");
  if (!(perturbation_range[0] >= 0.0 && perturbation_range[0] <= perturbation_range[1]))
    throw ConfigError("fluid: invalid perturbation range");
  if (delta && !(*delta > 0.0)) throw ConfigError("fluid: delta must be positive");
  if (query_points == 0) throw ConfigError("fluid: query_points must be >= 1");
}

std::vector<double> alien_coefficient(std::span<const double> u, std::span<const double> v,
                                      std::span<const double> omega, const Forcing& forcing) {
  if (u.size() != v.size() || u.size() != omega.size())
    throw ArgumentError("alien_coefficient: grids differ in size");
  std::vector<double> c(u.size(), 0.0);
  const double a = forcing.alpha;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double speed2 = u[i] * u[i] + v[i] * v[i];
    const double c_vel = forcing.gamma_velocity * std::sin(forcing.beta_velocity * speed2);
    const double c_vort = forcing.gamma_vorticity * std::cos(forcing.beta_vorticity * omega[i]);
    switch (forcing.kind) {
      case ForcingKind::None: break;
      case ForcingKind::VelocityMod: c[i] = c_vel; break;
      case ForcingKind::VorticityMod: c[i] = c_vort; break;
      case ForcingKind::Combined: c[i] = a * c_vel + (1.0 - a) * c_vort; break;
    }
  }
  return c;
}

FluidSolver::FluidSolver(FluidConfig config)
    : config_(std::move(config)), plan_((config_.validate(), std::vector<std::size_t>{config_.n, config_.n})) {
  const std::size_t n = config_.n;
  const double scale = 2.0 * std::numbers::pi / config_.L;
  k_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long f = numerics::fft_frequency(i, n);
    // The Nyquist mode has no well-defined derivative on a real field.
    k_[i] = (2 * static_cast<std::size_t>(std::labs(f)) == n) ? 0.0 : scale * static_cast<double>(f);
  }
  const double cutoff = config_.dealias_ratio * static_cast<double>(n) / 2.0;
  k2_.resize(n * n);
  mask_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const long fi = std::labs(numerics::fft_frequency(i, n));
    for (std::size_t j = 0; j < n; ++j) {
      const long fj = std::labs(numerics::fft_frequency(j, n));
      k2_[i * n + j] = k_[i] * k_[i] + k_[j] * k_[j];
      const bool nyquist = 2 * static_cast<std::size_t>(fi) == n || 2 * static_cast<std::size_t>(fj) == n;
      mask_[i * n + j] = (!nyquist && static_cast<double>(fi) <= cutoff &&
                          static_cast<double>(fj) <= cutoff)
                             ? 1
                             : 0;
    }
  }
  const std::size_t total = n * n;
  work_.resize(total);
  u_.resize(total);
  v_.resize(total);
  wx_.resize(total);
  wy_.resize(total);
  w_.resize(total);
  stage_.resize(total);
  k1_.resize(total);
  k2buf_.resize(total);
  k3_.resize(total);
  k4_.resize(total);
}

void FluidSolver::dealias(ComplexVector& spectral) const {
  for (std::size_t idx = 0; idx < spectral.size(); ++idx)
    if (!mask_[idx]) spectral[idx] = Complex{0.0, 0.0};
}

void FluidSolver::inverse_real(const ComplexVector& spectral, std::vector<double>& out) const {
  std::copy(spectral.begin(), spectral.end(), work_.begin());
  plan_.inverse(work_);
  for (std::size_t idx = 0; idx < work_.size(); ++idx) out[idx] = work_[idx].real();
}

VorticityField FluidSolver::from_physical(const RealGrid2D& omega) const {
  if (omega.nx != n() || omega.ny != n()) throw ArgumentError("from_physical: grid size mismatch");
  VorticityField field{n(), config_.L, ComplexVector(n() * n())};
  for (std::size_t idx = 0; idx < field.spectral.size(); ++idx)
    field.spectral[idx] = Complex{omega.values[idx], 0.0};
  plan_.forward(field.spectral);
  field.spectral[0] = Complex{0.0, 0.0};
  dealias(field.spectral);
  return field;
}

VorticityField FluidSolver::kelvin_helmholtz(const ShearLayer& shear) const {
  const std::size_t n = this->n();
  const double L = config_.L;
  const double h = L / static_cast<double>(n);
  const double width = 4.0 * shear.delta;
  ComplexVector u_hat(n * n), v_hat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * h;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = static_cast<double>(j) * h;
      const double y1 = (y - 0.25 * L) / shear.delta;
      const double y2 = (y - 0.75 * L) / shear.delta;
      const double u = std::tanh(y1) - std::tanh(y2) - 1.0;
      const double e1 = (y - 0.25 * L) / width;
      const double e2 = (y - 0.75 * L) / width;
      const double envelope = std::exp(-e1 * e1) + std::exp(-e2 * e2);
      const double v = shear.perturbation_scale * std::sin(2.0 * std::numbers::pi * x / L) * envelope;
      u_hat[i * n + j] = Complex{u, 0.0};
      v_hat[i * n + j] = Complex{v, 0.0};
    }
  }
  plan_.forward(u_hat);
  plan_.forward(v_hat);
  VorticityField field{n, L, ComplexVector(n * n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = i * n + j;
      field.spectral[idx] = kI * k_[i] * v_hat[idx] - kI * k_[j] * u_hat[idx];
    }
  field.spectral[0] = Complex{0.0, 0.0};
  dealias(field.spectral);
  return field;
}

RealGrid2D FluidSolver::to_physical(const VorticityField& field) const {
  RealGrid2D out(n(), n(), config_.L, config_.L);
  inverse_real(field.spectral, out.values);
  return out;
}

double FluidSolver::imaginary_residue(const VorticityField& field) const {
  std::copy(field.spectral.begin(), field.spectral.end(), work_.begin());
  plan_.inverse(work_);
  double worst = 0.0;
  for (const auto& c : work_) worst = std::max(worst, std::abs(c.imag()));
  return worst;
}

FluidSolver::Velocity FluidSolver::velocity(const VorticityField& field) const {
  const std::size_t n = this->n();
  Velocity out{RealGrid2D(n, n, config_.L, config_.L), RealGrid2D(n, n, config_.L, config_.L)};
  ComplexVector u_hat(n * n), v_hat(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = i * n + j;
      const Complex psi = k2_[idx] > 0.0 ? field.spectral[idx] / k2_[idx] : Complex{0.0, 0.0};
      u_hat[idx] = kI * k_[j] * psi;
      v_hat[idx] = -kI * k_[i] * psi;
    }
  inverse_real(u_hat, out.u.values);
  inverse_real(v_hat, out.v.values);
  return out;
}

double FluidSolver::spectral_divergence(const VorticityField& field) const {
  const std::size_t n = this->n();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = i * n + j;
      const Complex psi = k2_[idx] > 0.0 ? field.spectral[idx] / k2_[idx] : Complex{0.0, 0.0};
      const Complex u_hat = kI * k_[j] * psi;
      const Complex v_hat = -kI * k_[i] * psi;
      worst = std::max(worst, std::abs(kI * k_[i] * u_hat + kI * k_[j] * v_hat));
    }
  return worst;
}

double FluidSolver::kinetic_energy(const VorticityField& field) const {
  double sum = 0.0;
  for (std::size_t idx = 0; idx < field.spectral.size(); ++idx)
    if (k2_[idx] > 0.0) sum += std::norm(field.spectral[idx]) / k2_[idx];
  const double nn = static_cast<double>(n() * n());
  return 0.5 * config_.L * config_.L * sum / (nn * nn);
}

double FluidSolver::enstrophy(const VorticityField& field) const {
  double sum = 0.0;
  for (const auto& c : field.spectral) sum += std::norm(c);
  const double nn = static_cast<double>(n() * n());
  return 0.5 * config_.L * config_.L * sum / (nn * nn);
}

void FluidSolver::rhs(const ComplexVector& w_hat, ComplexVector& out, std::int64_t step_index) const {
  const std::size_t n = this->n();
  const std::size_t total = n * n;
  if (w_hat.size() != total) throw ArgumentError("rhs: field size mismatch");
  out.resize(total);

  // Velocity from the streamfunction, vorticity gradient, vorticity itself.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = i * n + j;
      const Complex psi = k2_[idx] > 0.0 ? w_hat[idx] / k2_[idx] : Complex{0.0, 0.0};
      stage_[idx] = kI * k_[j] * psi;
    }
  inverse_real(stage_, u_);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = i * n + j;
      const Complex psi = k2_[idx] > 0.0 ? w_hat[idx] / k2_[idx] : Complex{0.0, 0.0};
      stage_[idx] = -kI * k_[i] * psi;
    }
  inverse_real(stage_, v_);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) stage_[i * n + j] = kI * k_[i] * w_hat[i * n + j];
  inverse_real(stage_, wx_);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) stage_[i * n + j] = kI * k_[j] * w_hat[i * n + j];
  inverse_real(stage_, wy_);

  for (std::size_t idx = 0; idx < total; ++idx)
    work_[idx] = Complex{u_[idx] * wx_[idx] + v_[idx] * wy_[idx], 0.0};
  plan_.forward(work_);
  for (std::size_t idx = 0; idx < total; ++idx) out[idx] = -work_[idx];

  if (config_.forcing.active()) {
    inverse_real(w_hat, w_);
    const std::vector<double> c = alien_coefficient(u_, v_, w_, config_.forcing);
    // f = C * (v, -u); curl f = d(fy)/dx - d(fx)/dy.
    for (std::size_t idx = 0; idx < total; ++idx) work_[idx] = Complex{c[idx] * v_[idx], 0.0};
    plan_.forward(work_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] -= kI * k_[j] * work_[i * n + j];
    for (std::size_t idx = 0; idx < total; ++idx) work_[idx] = Complex{-c[idx] * u_[idx], 0.0};
    plan_.forward(work_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += kI * k_[i] * work_[i * n + j];
  }

  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!mask_[idx]) {
      out[idx] = Complex{0.0, 0.0};
      continue;
    }
    out[idx] -= config_.nu * k2_[idx] * w_hat[idx];
    if (!std::isfinite(out[idx].real()) || !std::isfinite(out[idx].imag()))
      throw NumericalBlowup("fluid tendency became non-finite", step_index);
  }
}

void FluidSolver::rk4_step(VorticityField& field, std::int64_t step_index, std::optional<double> dt_override) const {
  const double dt = dt_override.value_or(config_.dt);
  auto& w = field.spectral;
  const std::size_t total = w.size();
  ComplexVector tmp(total);
  rhs(w, k1_, step_index);
  for (std::size_t i = 0; i < total; ++i) tmp[i] = w[i] + 0.5 * dt * k1_[i];
  rhs(tmp, k2buf_, step_index);
  for (std::size_t i = 0; i < total; ++i) tmp[i] = w[i] + 0.5 * dt * k2buf_[i];
  rhs(tmp, k3_, step_index);
  for (std::size_t i = 0; i < total; ++i) tmp[i] = w[i] + dt * k3_[i];
  rhs(tmp, k4_, step_index);
  for (std::size_t i = 0; i < total; ++i)
    w[i] += dt / 6.0 * (k1_[i] + 2.0 * k2buf_[i] + 2.0 * k3_[i] + k4_[i]);
}

ShearLayer draw_shear_layer(const FluidConfig& config, numerics::SeededRng& rng) {
  // Both draws always happen so fixing one parameter does not shift the other.
  ShearLayer s;
  s.delta = numerics::sample_uniform(rng, config.delta_range[0], config.delta_range[1]);
  s.perturbation_scale =
      numerics::sample_uniform(rng, config.perturbation_range[0], config.perturbation_range[1]);
  if (config.delta) s.delta = *config.delta;
  if (config.perturbation_scale) s.perturbation_scale = *config.perturbation_scale;
  return s;
}

std::vector<PointObservation> observe_vorticity(
    const RealGrid2D& omega, std::span<const std::pair<std::array<double, 2>, protocol::Fidelity>> points,
    const protocol::CostModel& model, numerics::SeededRng& rng) {
  if (points.empty()) throw ProtocolError(ErrorCode::EmptySelection, "empty selection");
  for (const auto& [p, f] : points)
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
      throw ProtocolError(ErrorCode::InvalidCoordinate, "coordinates must be finite numbers");
  std::vector<PointObservation> out;
  out.reserve(points.size());
  for (const auto& [p, f] : points) {
    const double exact = numerics::bilinear_interpolate(omega, p[0], p[1]);
    out.push_back({p[0], p[1], f, numerics::sample_gaussian(rng, exact, model.sigma(f))});
  }
  return out;
}

std::vector<double> fluid_truth(const RealGrid2D& omega, std::span<const std::array<double, 2>> points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(numerics::bilinear_interpolate(omega, p[0], p[1]));
  return out;
}

void write_snapshot(const std::string& path, const RealGrid2D& omega, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_snapshot: cannot open " + path);
  const char magic[4] = {'M', 'A', 'D', 'V'};
  const auto n = static_cast<std::uint32_t>(omega.nx);
  os.write(magic, 4);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&omega.length_x), sizeof(double));
  os.write(reinterpret_cast<const char*>(&time), sizeof(double));
  os.write(reinterpret_cast<const char*>(omega.values.data()),
           static_cast<std::streamsize>(omega.values.size() * sizeof(double)));
  if (!os) throw Error("write_snapshot: write failed for " + path);
}

RealGrid2D read_snapshot(const std::string& path, double* time) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("read_snapshot: cannot open " + path);
  char magic[4];
  std::uint32_t n = 0;
  double L = 0.0, t = 0.0;
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MADV", 4) != 0) throw Error("read_snapshot: bad magic in " + path);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&L), sizeof L);
  is.read(reinterpret_cast<char*>(&t), sizeof t);
  RealGrid2D grid(n, n, L, L);
  is.read(reinterpret_cast<char*>(grid.values.data()),
          static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
  if (!is) throw Error("read_snapshot: truncated file " + path);
  if (time) *time = t;
  return grid;
}

}  // namespace madphys::fluid
