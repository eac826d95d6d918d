#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "madphys/core/error.hpp"
#include "madphys/fluid/fluid.hpp"

using namespace madphys;
using namespace madphys::fluid;

namespace {

FluidConfig small(std::size_t n = 32) {
  FluidConfig c;
  c.n = n;
  return c;
}

RealGrid2D cosine_x(std::size_t n, double L) {
  RealGrid2D g(n, n, L, L);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g.at(i, j) = std::cos(static_cast<double>(i) * g.hx());
  return g;
}

}  // namespace

TEST(FluidConfig, Validation) {
  FluidConfig c = small();
  EXPECT_NO_THROW(c.validate());
  c.n = 48;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small();
  c.forcing.alpha = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_forcing_kind("combined"), ForcingKind::Combined);
  EXPECT_THROW(parse_forcing_kind("nope"), ConfigError);
}

TEST(FluidSolver, DealiasMaskFollowsTwoThirdsRule) {
  const FluidSolver solver(small(32));
  // Cutoff is 2/3 * 16 = 10.67: |k| <= 10 kept, 11 removed, Nyquist removed.
  EXPECT_TRUE(solver.retained(10, 0));
  EXPECT_FALSE(solver.retained(11, 0));
  EXPECT_TRUE(solver.retained(22, 22));  // k = -10
  EXPECT_FALSE(solver.retained(21, 0));  // k = -11
  EXPECT_FALSE(solver.retained(16, 0));
}

TEST(FluidSolver, PhysicalRoundTripAndEnergies) {
  const FluidSolver solver(small(32));
  const VorticityField f = solver.from_physical(cosine_x(32, solver.config().L));
  const RealGrid2D back = solver.to_physical(f);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(back.at(i, 5), std::cos(i * back.hx()), 1e-12);
  EXPECT_LT(solver.imaginary_residue(f), 1e-12);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(solver.kinetic_energy(f), pi2, 1e-10);
  EXPECT_NEAR(solver.enstrophy(f), pi2, 1e-10);
  const auto vel = solver.velocity(f);
  EXPECT_NEAR(vel.u.at(3, 7), 0.0, 1e-12);
  EXPECT_NEAR(vel.v.at(8, 2), std::sin(8 * vel.v.hx()), 1e-12);
  EXPECT_LT(solver.spectral_divergence(f), 1e-12);
}

TEST(FluidSolver, SingleModeViscousDecay) {
  FluidConfig c = small(32);
  c.nu = 0.01;
  const FluidSolver solver(c);
  VorticityField f = solver.from_physical(cosine_x(32, c.L));
  for (int step = 1; step <= 500; ++step) solver.rk4_step(f, step);
  const RealGrid2D w = solver.to_physical(f);
  EXPECT_NEAR(w.at(0, 0), std::exp(-0.01 * 0.5), 1e-10);
}

TEST(FluidSolver, KelvinHelmholtzInitialField) {
  const FluidSolver solver(small(64));
  const VorticityField f = solver.kelvin_helmholtz({0.1, 0.3});
  EXPECT_LT(solver.imaginary_residue(f), 1e-10);
  EXPECT_EQ(f.spectral[0], Complex(0.0, 0.0));
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j)
      if (!solver.retained(i, j)) ASSERT_EQ(f.spectral[i * 64 + j], Complex(0.0, 0.0));
  // Vorticity concentrates at the two layers, with opposite signs.
  const RealGrid2D w = solver.to_physical(f);
  const std::size_t q1 = 16, q3 = 48;
  EXPECT_LT(w.at(0, q1) * w.at(0, q3), 0.0);
  EXPECT_GT(std::abs(w.at(0, q1)), 10.0 * std::abs(w.at(0, 32)));
}

TEST(FluidSolver, EnergyDecaysAndDivergenceStaysZero) {
  FluidConfig c = small(32);
  const FluidSolver solver(c);
  VorticityField f = solver.kelvin_helmholtz({0.2, 0.3});
  double previous = solver.kinetic_energy(f);
  for (int step = 1; step <= 200; ++step) {
    solver.rk4_step(f, step);
    const double e = solver.kinetic_energy(f);
    ASSERT_LE(e, previous * (1.0 + 1e-12));
    ASSERT_LT(solver.spectral_divergence(f), 1e-10);
    previous = e;
  }
}

TEST(FluidSolver, ForcingChangesTheTrajectory) {
  FluidConfig plain = small(32), forced = small(32);
  forced.forcing.kind = ForcingKind::VorticityMod;
  const FluidSolver a(plain), b(forced);
  VorticityField fa = a.kelvin_helmholtz({0.2, 0.3}), fb = b.kelvin_helmholtz({0.2, 0.3});
  for (int step = 1; step <= 50; ++step) {
    a.rk4_step(fa, step);
    b.rk4_step(fb, step);
  }
  const RealGrid2D wa = a.to_physical(fa), wb = b.to_physical(fb);
  double diff = 0.0;
  for (std::size_t k = 0; k < wa.values.size(); ++k) diff = std::max(diff, std::abs(wa.values[k] - wb.values[k]));
  EXPECT_GT(diff, 1e-4);
}

TEST(Forcing, CoefficientFormulas) {
  const std::vector<double> u{0.5}, v{0.5}, w{2.0};
  Forcing f;
  f.kind = ForcingKind::VelocityMod;
  EXPECT_NEAR(alien_coefficient(u, v, w, f)[0], 0.5 * std::sin(3.0 * 0.5), 1e-15);
  f.kind = ForcingKind::VorticityMod;
  EXPECT_NEAR(alien_coefficient(u, v, w, f)[0], 5.0 * std::cos(std::numbers::pi / 16.0 * 2.0), 1e-15);
  f.kind = ForcingKind::Combined;
  EXPECT_NEAR(alien_coefficient(u, v, w, f)[0],
              0.5 * 0.5 * std::sin(1.5) + 0.5 * 5.0 * std::cos(std::numbers::pi / 8.0), 1e-15);
  f.kind = ForcingKind::None;
  EXPECT_EQ(alien_coefficient(u, v, w, f)[0], 0.0);
  EXPECT_FALSE(f.active());
}

TEST(ShearLayer, DrawsStayInRange) {
  FluidConfig c = small();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    numerics::SeededRng rng(seed, numerics::Stream::Init);
    const ShearLayer s = draw_shear_layer(c, rng);
    ASSERT_GE(s.delta, 0.05);
    ASSERT_LT(s.delta, 0.2);
    ASSERT_GE(s.perturbation_scale, 0.15);
    ASSERT_LT(s.perturbation_scale, 0.5);
  }
  c.delta = 0.1;
  numerics::SeededRng rng(1, numerics::Stream::Init);
  EXPECT_EQ(draw_shear_layer(c, rng).delta, 0.1);
  EXPECT_EQ(rng.draws(), 2u);
}

TEST(FluidObserve, InterpolationNoiseAndErrors) {
  const RealGrid2D w = cosine_x(32, 2.0 * std::numbers::pi);
  const protocol::CostModel m;
  numerics::SeededRng rng(3, numerics::Stream::Noise);
  const std::vector<std::pair<std::array<double, 2>, protocol::Fidelity>> pts{{{0.0, 1.0}, protocol::Fidelity::High}};
  const auto obs = observe_vorticity(w, pts, m, rng);
  EXPECT_NEAR(obs[0].value, 1.0, 0.01);
  const std::vector<std::array<double, 2>> q{{0.0, 0.0}, {std::numbers::pi, 2.0}};
  const auto truth = fluid_truth(w, q);
  EXPECT_DOUBLE_EQ(truth[0], 1.0);
  EXPECT_NEAR(truth[1], -1.0, 1e-12);
  const std::vector<std::pair<std::array<double, 2>, protocol::Fidelity>> bad{
      {{std::nan(""), 0.0}, protocol::Fidelity::High}};
  try {
    observe_vorticity(w, bad, m, rng);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidCoordinate);
  }
  EXPECT_THROW(observe_vorticity(w, {}, m, rng), ProtocolError);
}

TEST(Snapshot, RoundTrip) {
  const RealGrid2D w = cosine_x(16, 2.0 * std::numbers::pi);
  const auto path = (std::filesystem::temp_directory_path() / "madphys_snapshot.bin").string();
  write_snapshot(path, w, 1.25);
  double t = 0.0;
  const RealGrid2D back = read_snapshot(path, &t);
  EXPECT_EQ(t, 1.25);
  EXPECT_EQ(back.values, w.values);
  std::filesystem::remove(path);
  EXPECT_THROW(read_snapshot(path), Error);
}
