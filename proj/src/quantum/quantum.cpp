#include "madphys/quantum/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "madphys/core/error.hpp"

namespace madphys::quantum {

namespace {

constexpr int kMaxPacketDraws = 1000;

double magnitude_pow(const Complex& c, double p) {
  if (p == 2.0) return std::norm(c);
  if (p == 1.0) return std::abs(c);
  if (p == 3.0) return std::norm(c) * std::abs(c);
  return std::pow(std::abs(c), p);
}

// Plain complex product; skips the library's NaN/Inf recovery path.
inline Complex mul(const Complex& a, const Complex& b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// Smooth 0 -> 1 ramp over the last `width` before the wall at |x| = half_box;
// zero deeper inside, one on and beyond the wall.
double wall_ramp(double x, double half_box, double width) {
  const double t = std::clamp((std::abs(x) - (half_box - width)) / width, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

void check_particle(int particle) {
  if (particle != 1 && particle != 2) throw ArgumentError("particle must be 1 or 2");
}

}  // namespace

void QuantumConfig::validate() const {
  if (!numerics::fft_size_supported(n) || n < 4) throw ConfigError("quantum: n must be a power of two >= 4");
  if (n > 64) throw ConfigError("quantum: n above 64 exceeds the joint-grid memory budget");
  if (!(domain[0] > 0.0 && domain[1] > 0.0)) throw ConfigError("quantum: invalid domain");
  if (!(box[0] > 0.0 && box[0] <= domain[0] && box[1] > 0.0 && box[1] <= domain[1]))
    throw ConfigError("quantum: box must fit inside the domain");
  if (!(hbar > 0.0)) throw ConfigError("quantum: hbar must be positive");
  if (!(dt > 0.0)) throw ConfigError("quantum: dt must be positive");
  if (!(well_height >= 0.0)) throw ConfigError("quantum: well height must be >= 0");
  if (!(t_max > 0.0)) throw ConfigError("quantum: t_max must be positive");
  if (!(budget_per_trial >= 0.0)) throw ConfigError("quantum: budget must be >= 0");
  if (num_trials < 1) throw ConfigError("quantum: num_trials must be >= 1");
  if (!(p >= 1.0)) throw ConfigError("quantum: measurement norm p must be >= 1");
  if (!(lambda_ent >= 0.0)) throw ConfigError("quantum: lambda must be >= 0");
  if (!(wall_width_cells > 0.0)) throw ConfigError("quantum: wall width must be positive");
  if (!(collapse_width_cells > 0.0)) throw ConfigError("quantum: collapse width must be positive");
}

double JointWavefunction::coordinate(int axis, std::size_t i) const noexcept {
  const double h = axis == 0 ? hx() : hy();
  return -0.5 * domain[static_cast<std::size_t>(axis)] + (static_cast<double>(i) + 0.5) * h;
}

std::array<PacketParams, 2> draw_packets(const QuantumConfig& config, numerics::SeededRng& rng) {
  config.validate();
  if (config.packets) return *config.packets;
  const std::array<double, 2> min_std{2.0 * config.hx(), 2.0 * config.hy()};
  std::array<PacketParams, 2> out;
  for (std::size_t k = 0; k < 2; ++k) {
    PacketParams& pk = out[k];
    int attempts = 0;
    do {
      pk.mass = numerics::sample_uniform(rng, config.mass_range[k][0], config.mass_range[k][1]);
    } while (!(pk.mass > 0.0) && ++attempts < kMaxPacketDraws);
    for (std::size_t a = 0; a < 2; ++a)
      pk.mean[a] = numerics::sample_uniform(rng, config.mean_range[k][0], config.mean_range[k][1]);
    for (std::size_t a = 0; a < 2; ++a) {
      attempts = 0;
      do {
        pk.std[a] = numerics::sample_uniform(rng, config.std_range[0], config.std_range[1]);
      } while (pk.std[a] < min_std[a] && ++attempts < kMaxPacketDraws);
    }
    for (std::size_t a = 0; a < 2; ++a)
      pk.velocity[a] =
          numerics::sample_uniform(rng, config.velocity_range[k][0], config.velocity_range[k][1]);
    if (!(pk.mass > 0.0)) throw InitError("draw_packets: mass range yields no positive mass");
  }
  return out;
}

JointWavefunction init_wavefunction(const QuantumConfig& config,
                                    const std::array<PacketParams, 2>& packets) {
  config.validate();
  JointWavefunction psi{config.n, config.domain, ComplexVector(config.n * config.n * config.n * config.n)};
  const std::size_t n = config.n;
  const std::array<double, 2> h{psi.hx(), psi.hy()};
  // Separable single-particle factors on the n x n grid.
  std::array<std::vector<Complex>, 2> single;
  for (std::size_t k = 0; k < 2; ++k) {
    const PacketParams& pk = packets[k];
    if (!(pk.mass > 0.0)) throw InitError("init_wavefunction: packet mass must be positive");
    for (std::size_t a = 0; a < 2; ++a)
      if (pk.std[a] < 2.0 * h[a])
        throw InitError("init_wavefunction: packet width below two grid spacings is unresolved");
    single[k].resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = psi.coordinate(0, i);
      for (std::size_t j = 0; j < n; ++j) {
        const double y = psi.coordinate(1, j);
        const double gx = (x - pk.mean[0]) / pk.std[0];
        const double gy = (y - pk.mean[1]) / pk.std[1];
        const double amplitude = std::exp(-0.25 * (gx * gx + gy * gy));
        const double phase = pk.mass * (pk.velocity[0] * x + pk.velocity[1] * y) / config.hbar;
        single[k][i * n + j] = std::polar(amplitude, phase);
      }
    }
  }
  const double lambda = config.lambda_ent;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Complex f1 = single[0][a * n + b];
      const double x1 = psi.coordinate(0, a);
      const double y1 = psi.coordinate(1, b);
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          Complex value = f1 * single[1][c * n + d];
          if (lambda != 0.0) {
            const double dx = x1 - psi.coordinate(0, c);
            const double dy = y1 - psi.coordinate(1, d);
            value *= std::exp(-lambda * (dx * dx + dy * dy));
          }
          psi.values[psi.index(a, b, c, d)] = value;
        }
    }
  lp_normalize(psi, config.p);
  return psi;
}

double lp_integral(const JointWavefunction& psi, double p) {
  double sum = 0.0;
  for (const auto& c : psi.values) sum += magnitude_pow(c, p);
  return sum * psi.cell_volume();
}

double l2_integral(const JointWavefunction& psi) { return lp_integral(psi, 2.0); }

void lp_normalize(JointWavefunction& psi, double p) {
  const double total = lp_integral(psi, p);
  if (!(total > 0.0) || !std::isfinite(total))
    throw NormalizationError("lp_normalize: wavefunction has zero or non-finite norm");
  const double scale = std::pow(total, -1.0 / p);
  for (auto& c : psi.values) c *= scale;
}

std::vector<double> marginal_density(const JointWavefunction& psi, int particle, double p) {
  check_particle(particle);
  const std::size_t n = psi.n;
  const std::size_t block = n * n;
  const double area = psi.cell_area();
  std::vector<double> rho(block, 0.0);
  if (particle == 1) {
    for (std::size_t r1 = 0; r1 < block; ++r1) {
      double s = 0.0;
      const Complex* row = psi.values.data() + r1 * block;
      for (std::size_t r2 = 0; r2 < block; ++r2) s += magnitude_pow(row[r2], p);
      rho[r1] = s * area;
    }
  } else {
    for (std::size_t r1 = 0; r1 < block; ++r1) {
      const Complex* row = psi.values.data() + r1 * block;
      for (std::size_t r2 = 0; r2 < block; ++r2) rho[r2] += magnitude_pow(row[r2], p);
    }
    for (auto& v : rho) v *= area;
  }
  return rho;
}

double region_probability(const JointWavefunction& psi, int particle, const Region& region, double p) {
  const std::vector<double> rho = marginal_density(psi, particle, p);
  const std::size_t n = psi.n;
  double prob = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = psi.coordinate(0, i);
    if (x < region.x_min || x > region.x_max) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = psi.coordinate(1, j);
      if (y < region.y_min || y > region.y_max) continue;
      prob += rho[i * n + j];
    }
  }
  return prob * psi.cell_area();
}

std::array<double, 2> mean_position(const JointWavefunction& psi, int particle, double p) {
  const std::vector<double> rho = marginal_density(psi, particle, p);
  const std::size_t n = psi.n;
  double mx = 0.0, my = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double w = rho[i * n + j];
      mx += w * psi.coordinate(0, i);
      my += w * psi.coordinate(1, j);
      total += w;
    }
  return {mx / total, my / total};
}

CollapseOutcome measure_and_collapse(JointWavefunction& psi, int particle, protocol::Fidelity fidelity,
                                     const protocol::CostModel& model, numerics::SeededRng& rng,
                                     double p, double collapse_width_cells) {
  check_particle(particle);
  const std::size_t n = psi.n;
  const std::vector<double> rho = marginal_density(psi, particle, p);
  double total = 0.0;
  for (double v : rho) total += v;
  if (!(total > 0.0)) throw NormalizationError("measure_and_collapse: empty marginal");

  const double target = rng.uniform01() * total;
  std::size_t chosen = rho.size() - 1;
  double running = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    running += rho[k];
    if (target < running) {
      chosen = k;
      break;
    }
  }
  // Guard against landing on a zero-probability tail cell through rounding.
  while (rho[chosen] == 0.0 && chosen > 0) --chosen;

  CollapseOutcome out;
  out.cell = {chosen / n, chosen % n};
  out.center = {psi.coordinate(0, out.cell[0]), psi.coordinate(1, out.cell[1])};
  const double sigma = model.sigma(fidelity);
  out.reported = {numerics::sample_gaussian(rng, out.center[0], sigma),
                  numerics::sample_gaussian(rng, out.center[1], sigma)};

  const double sx = collapse_width_cells * psi.hx();
  const double sy = collapse_width_cells * psi.hy();
  std::vector<double> kernel(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = (psi.coordinate(0, i) - out.center[0]) / sx;
      const double dy = (psi.coordinate(1, j) - out.center[1]) / sy;
      kernel[i * n + j] = std::exp(-0.5 * (dx * dx + dy * dy));
    }
  const std::size_t block = n * n;
  for (std::size_t r1 = 0; r1 < block; ++r1)
    for (std::size_t r2 = 0; r2 < block; ++r2)
      psi.values[r1 * block + r2] *= particle == 1 ? kernel[r1] : kernel[r2];
  lp_normalize(psi, p);
  return out;
}

Propagator::Propagator(const QuantumConfig& config, const std::array<PacketParams, 2>& packets)
    : config_(config),
      masses_{packets[0].mass, packets[1].mass},
      plan_((config.validate(), std::vector<std::size_t>{config.n, config.n, config.n, config.n})) {
  const std::size_t n = config_.n;
  JointWavefunction geometry{n, config_.domain, {}};
  potential_half_.resize(n * n);
  potential_values_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = potential(geometry.coordinate(0, i), geometry.coordinate(1, j));
      potential_values_[i * n + j] = v;
      potential_half_[i * n + j] = std::polar(1.0, -v * config_.dt / (2.0 * config_.hbar));
    }
  const double kx_scale = 2.0 * std::numbers::pi / config_.domain[0];
  const double ky_scale = 2.0 * std::numbers::pi / config_.domain[1];
  for (std::size_t k = 0; k < 2; ++k) {
    kinetic_[k].resize(n * n);
    kinetic_energy_[k].resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double kx = kx_scale * static_cast<double>(numerics::fft_frequency(i, n));
        const double ky = ky_scale * static_cast<double>(numerics::fft_frequency(j, n));
        const double t = config_.hbar * config_.hbar * (kx * kx + ky * ky) / (2.0 * masses_[k]);
        kinetic_energy_[k][i * n + j] = t;
        kinetic_[k][i * n + j] = std::polar(1.0, -t * config_.dt / config_.hbar);
      }
  }
}

double Propagator::potential(double x, double y) const {
  const double w_x = config_.wall_width_cells * config_.hx();
  const double w_y = config_.wall_width_cells * config_.hy();
  const double rx = wall_ramp(x, 0.5 * config_.box[0], w_x);
  const double ry = wall_ramp(y, 0.5 * config_.box[1], w_y);
  return config_.well_height * (1.0 - (1.0 - rx) * (1.0 - ry));
}

void Propagator::step(JointWavefunction& psi, bool renormalize) const {
  const std::size_t block = config_.n * config_.n;
  if (psi.values.size() != block * block) throw ArgumentError("Propagator: grid size mismatch");
  Complex* data = psi.values.data();
  auto apply_potential = [&] {
    for (std::size_t r1 = 0; r1 < block; ++r1) {
      const Complex v1 = potential_half_[r1];
      Complex* row = data + r1 * block;
      for (std::size_t r2 = 0; r2 < block; ++r2) row[r2] = mul(row[r2], mul(v1, potential_half_[r2]));
    }
  };
  apply_potential();
  plan_.forward(psi.values);
  for (std::size_t r1 = 0; r1 < block; ++r1) {
    const Complex k1 = kinetic_[0][r1];
    Complex* row = data + r1 * block;
    for (std::size_t r2 = 0; r2 < block; ++r2) row[r2] = mul(row[r2], mul(k1, kinetic_[1][r2]));
  }
  plan_.inverse(psi.values);
  apply_potential();
  if (renormalize) lp_normalize(psi, config_.p);
}

double Propagator::energy(const JointWavefunction& psi) const {
  const std::size_t block = config_.n * config_.n;
  double norm = 0.0, potential_sum = 0.0;
  for (std::size_t r1 = 0; r1 < block; ++r1)
    for (std::size_t r2 = 0; r2 < block; ++r2) {
      const double w = std::norm(psi.values[r1 * block + r2]);
      norm += w;
      potential_sum += w * (potential_values_[r1] + potential_values_[r2]);
    }
  ComplexVector spectrum(psi.values.begin(), psi.values.end());
  plan_.forward(spectrum);
  double spec_norm = 0.0, kinetic_sum = 0.0;
  for (std::size_t r1 = 0; r1 < block; ++r1)
    for (std::size_t r2 = 0; r2 < block; ++r2) {
      const double w = std::norm(spectrum[r1 * block + r2]);
      spec_norm += w;
      kinetic_sum += w * (kinetic_energy_[0][r1] + kinetic_energy_[1][r2]);
    }
  return kinetic_sum / spec_norm + potential_sum / norm;
}

}  // namespace madphys::quantum
