#include <gtest/gtest.h>

#include <cmath>

#include "madphys/core/error.hpp"
#include "madphys/quantum/quantum.hpp"
#include "oracles.hpp"

using namespace madphys;
using namespace madphys::quantum;

namespace {

QuantumConfig grid16(double p = 2.0, double lambda = 0.0) {
  QuantumConfig c;
  c.n = 16;
  c.p = p;
  c.lambda_ent = lambda;
  return c;
}

std::array<PacketParams, 2> centred_packets(double std = 1.3) {
  PacketParams a{1.0, {-1.0, 0.5}, {std, std}, {0.0, 0.0}};
  PacketParams b{2.0, {1.5, -1.0}, {std, std}, {0.0, 0.0}};
  return {a, b};
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) tv += std::abs(a[k] - b[k]);
  return 0.5 * tv;
}

}  // namespace

TEST(QuantumConfig, Validation) {
  QuantumConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n = 48;
  EXPECT_THROW(c.validate(), ConfigError);
  c.n = 128;
  EXPECT_THROW(c.validate(), ConfigError);
  c = QuantumConfig{};
  c.box = {12.0, 9.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = QuantumConfig{};
  c.p = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Wavefunction, CellCentres) {
  JointWavefunction psi{16, {10.0, 10.0}, {}};
  EXPECT_DOUBLE_EQ(psi.coordinate(0, 0), -5.0 + 0.3125);
  EXPECT_DOUBLE_EQ(psi.coordinate(1, 15), 5.0 - 0.3125);
  EXPECT_EQ(psi.index(0, 0, 0, 1), 1u);
  EXPECT_EQ(psi.index(1, 0, 0, 0), 4096u);
}

TEST(DrawPackets, RangesAndResolution) {
  QuantumConfig c;  // n = 32, h = 0.3125
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    numerics::SeededRng rng(seed, numerics::Stream::Init);
    const auto packets = draw_packets(c, rng);
    for (std::size_t k = 0; k < 2; ++k) {
      ASSERT_GT(packets[k].mass, 0.0);
      ASSERT_LE(packets[k].mass, c.mass_range[k][1]);
      for (std::size_t a = 0; a < 2; ++a) {
        ASSERT_GE(packets[k].std[a], 2.0 * c.hx());
        ASSERT_LT(packets[k].std[a], 1.0);
        ASSERT_GE(packets[k].mean[a], c.mean_range[k][0]);
        ASSERT_LT(packets[k].mean[a], c.mean_range[k][1]);
      }
    }
  }
  c.packets = centred_packets();
  numerics::SeededRng rng(0, numerics::Stream::Init);
  EXPECT_EQ(draw_packets(c, rng)[1].mass, 2.0);
}

TEST(InitWavefunction, NormalizedForEveryNorm) {
  for (double p : {1.0, 2.0, 3.0}) {
    const JointWavefunction psi = init_wavefunction(grid16(p), centred_packets());
    EXPECT_NEAR(lp_integral(psi, p), 1.0, 1e-12);
    std::vector<double> rho = marginal_density(psi, 2, p);
    double sum = 0.0;
    for (double v : rho) sum += v * psi.cell_area();
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(InitWavefunction, UnresolvedPacketRejected) {
  EXPECT_THROW(init_wavefunction(grid16(), centred_packets(1.0)), InitError);
}

TEST(InitWavefunction, SeparableWithoutEntanglement) {
  const JointWavefunction psi = init_wavefunction(grid16(), centred_packets());
  // psi(a, b) psi(c, d) == psi(a, d) psi(c, b) for a product state.
  const Complex lhs = psi.values[psi.index(7, 8, 9, 6)] * psi.values[psi.index(5, 9, 8, 8)];
  const Complex rhs = psi.values[psi.index(7, 8, 8, 8)] * psi.values[psi.index(5, 9, 9, 6)];
  EXPECT_LT(std::abs(lhs - rhs), 1e-14);
  const JointWavefunction ent = init_wavefunction(grid16(2.0, 5.0), centred_packets());
  const Complex l2 = ent.values[ent.index(7, 8, 9, 6)] * ent.values[ent.index(5, 9, 8, 8)];
  const Complex r2 = ent.values[ent.index(7, 8, 8, 8)] * ent.values[ent.index(5, 9, 9, 6)];
  EXPECT_GT(std::abs(l2 - r2), 1e-6 * std::abs(l2));
}

TEST(InitWavefunction, EntanglementPullsParticlesTogether) {
  const auto plain = init_wavefunction(grid16(), centred_packets());
  const auto ent = init_wavefunction(grid16(2.0, 5.0), centred_packets());
  auto gap = [](const JointWavefunction& psi) {
    const auto m1 = mean_position(psi, 1, 2.0), m2 = mean_position(psi, 2, 2.0);
    return std::hypot(m1[0] - m2[0], m1[1] - m2[1]);
  };
  EXPECT_LT(gap(ent), gap(plain));
}

TEST(Marginal, MatchesBruteForce) {
  for (double p : {1.0, 3.0}) {
    const auto psi = init_wavefunction(grid16(p, 2.0), centred_packets());
    for (int particle : {1, 2}) {
      const auto fast = marginal_density(psi, particle, p);
      const auto slow = oracle::marginal(psi, particle, p);
      for (std::size_t k = 0; k < fast.size(); ++k) ASSERT_NEAR(fast[k], slow[k], 1e-13);
    }
  }
  const auto psi = init_wavefunction(grid16(), centred_packets());
  EXPECT_THROW(marginal_density(psi, 3, 2.0), ArgumentError);
}

TEST(Region, Probabilities) {
  const auto psi = init_wavefunction(grid16(), centred_packets());
  EXPECT_NEAR(region_probability(psi, 1, {-5, 5, -5, 5}, 2.0), 1.0, 1e-12);
  EXPECT_EQ(region_probability(psi, 1, {10, 11, 10, 11}, 2.0), 0.0);
  const auto rho = oracle::marginal(psi, 1, 2.0);
  double left = 0.0;
  for (std::size_t i = 0; i < psi.n; ++i)
    for (std::size_t j = 0; j < psi.n; ++j)
      if (psi.coordinate(0, i) <= -1.0) left += rho[i * psi.n + j] * psi.cell_area();
  EXPECT_NEAR(region_probability(psi, 1, {-5, -1, -5, 5}, 2.0), left, 1e-12);
  EXPECT_GT(left, 0.3);
  EXPECT_LT(left, 0.7);
}

TEST(Collapse, LocalizesAtTheDrawnCell) {
  auto psi = init_wavefunction(grid16(), centred_packets());
  const protocol::CostModel m;
  numerics::SeededRng rng(9, numerics::Stream::Noise);
  const CollapseOutcome out = measure_and_collapse(psi, 1, protocol::Fidelity::High, m, rng, 2.0);
  EXPECT_EQ(rng.draws(), 5u);
  EXPECT_NEAR(out.reported[0], out.center[0], 0.01);
  EXPECT_NEAR(lp_integral(psi, 2.0), 1.0, 1e-12);
  const auto mean = mean_position(psi, 1, 2.0);
  EXPECT_NEAR(mean[0], out.center[0], psi.hx());
  EXPECT_NEAR(mean[1], out.center[1], psi.hy());
  // The other particle's marginal is untouched for a product state.
  const auto before = init_wavefunction(grid16(), centred_packets());
  const auto m2a = marginal_density(before, 2, 2.0), m2b = marginal_density(psi, 2, 2.0);
  for (std::size_t k = 0; k < m2a.size(); ++k) ASSERT_NEAR(m2a[k], m2b[k], 1e-10);
}

TEST(Collapse, SamplesFollowTheGeneralizedBornRule) {
  for (double p : {1.0, 3.0}) {
    auto psi = init_wavefunction(grid16(p), centred_packets());
    const protocol::CostModel m;
    numerics::SeededRng rng(13, numerics::Stream::Noise);
    measure_and_collapse(psi, 1, protocol::Fidelity::High, m, rng, p);
    auto rho = oracle::marginal(psi, 1, p);
    for (double& v : rho) v *= psi.cell_area();
    std::vector<double> counts(rho.size(), 0.0);
    const int samples = 3000;
    for (int s = 0; s < samples; ++s) {
      JointWavefunction copy = psi;
      const auto out = measure_and_collapse(copy, 1, protocol::Fidelity::Low, m, rng, p);
      counts[out.cell[0] * psi.n + out.cell[1]] += 1.0 / samples;
    }
    EXPECT_LT(total_variation(counts, rho), 0.05) << "p = " << p;
  }
}

TEST(Propagator, PotentialShape) {
  const QuantumConfig c = grid16();
  const Propagator prop(c, centred_packets());
  EXPECT_EQ(prop.potential(0.0, 0.0), 0.0);
  EXPECT_EQ(prop.potential(4.5, 0.0), c.well_height);
  EXPECT_EQ(prop.potential(0.0, -4.9), c.well_height);
  const double mid = prop.potential(4.0 - 0.625, 0.0);  // halfway up the ramp
  EXPECT_NEAR(mid, 0.5 * c.well_height, 1e-9);
}

TEST(Propagator, UnitaryAndEnergyConserving) {
  QuantumConfig c = grid16();
  const auto packets = centred_packets();
  auto psi = init_wavefunction(c, packets);
  const Propagator prop(c, packets);
  const double e0 = prop.energy(psi);
  for (int k = 0; k < 100; ++k) prop.step(psi, false);
  EXPECT_NEAR(l2_integral(psi), 1.0, 1e-12);
  EXPECT_NEAR(prop.energy(psi), e0, 0.02 * std::abs(e0));
}

TEST(Propagator, RenormalizesNonEuclideanNorms) {
  QuantumConfig c = grid16(3.0, 5.0);
  const auto packets = centred_packets();
  auto psi = init_wavefunction(c, packets);
  const Propagator prop(c, packets);
  for (int k = 0; k < 20; ++k) prop.step(psi);
  EXPECT_NEAR(lp_integral(psi, 3.0), 1.0, 1e-12);
}

TEST(Propagator, MovingPacketDrifts) {
  QuantumConfig c = grid16();
  c.dt = 0.01;
  PacketParams a{5.0, {-1.0, 0.0}, {1.3, 1.3}, {0.5, 0.0}};
  PacketParams b{5.0, {1.0, 0.0}, {1.3, 1.3}, {0.0, 0.0}};
  auto psi = init_wavefunction(c, {a, b});
  const Propagator prop(c, {a, b});
  for (int k = 0; k < 100; ++k) prop.step(psi);
  const auto m1 = mean_position(psi, 1, 2.0), m2 = mean_position(psi, 2, 2.0);
  EXPECT_NEAR(m1[0], -1.0 + 0.5 * 1.0, 0.05);
  EXPECT_NEAR(m2[0], 1.0, 0.05);
}
