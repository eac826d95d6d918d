#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "madphys/core/error.hpp"
#include "madphys/numerics/fft.hpp"
#include "madphys/numerics/interp.hpp"
#include "madphys/numerics/rng.hpp"
#include "madphys/numerics/small_matrix.hpp"

using namespace madphys;
using namespace madphys::numerics;

TEST(SeededRng, SameKeysSameSequence) {
  SeededRng a(42, Stream::Noise), b(42, Stream::Noise);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.draws(), 1000u);
}

TEST(SeededRng, StreamsAndSeedsDiffer) {
  SeededRng a(42, Stream::Noise), b(42, Stream::Query), c(43, Stream::Noise);
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
}

TEST(SeededRng, FastForwardMatchesDrawCounter) {
  SeededRng a(7, Stream::Noise);
  for (int i = 0; i < 37; ++i) sample_gaussian(a, 0.0, 1.0);
  EXPECT_EQ(a.draws(), 74u);
  SeededRng b(7, Stream::Noise);
  for (std::uint64_t i = 0; i < a.draws(); ++i) b.next_u64();
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(SeededRng, GaussianZeroSigmaStillConsumesTwoDraws) {
  SeededRng a(1, Stream::Noise);
  EXPECT_EQ(sample_gaussian(a, 3.5, 0.0), 3.5);
  EXPECT_EQ(a.draws(), 2u);
  EXPECT_THROW(sample_gaussian(a, 0.0, -1.0), ArgumentError);
}

TEST(SeededRng, UniformRanges) {
  SeededRng rng(3, Stream::Init);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = rng.uniform_index(5);
    ASSERT_LT(k, 5u);
    seen.insert(k);
    const double x = sample_uniform(rng, -2.0, 3.0);
    ASSERT_GE(x, -2.0);
    ASSERT_LT(x, 3.0);
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_THROW(rng.uniform_index(0), ArgumentError);
  EXPECT_THROW(sample_uniform(rng, 1.0, 0.0), ArgumentError);
}

TEST(SeededRng, GaussianMoments) {
  SeededRng rng(11, Stream::Noise);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_gaussian(rng, 1.0, 2.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 1.0, 0.03);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 2.0, 0.03);
}

TEST(Fft, RoundTripRank1To4) {
  SeededRng rng(5, Stream::Init);
  for (const auto& dims : std::vector<std::vector<std::size_t>>{{16}, {8, 4}, {4, 4, 8}, {4, 2, 4, 8}}) {
    FftPlan plan(dims);
    ComplexVector data(plan.size());
    for (auto& z : data) z = {rng.uniform01() - 0.5, rng.uniform01() - 0.5};
    const ComplexVector original = data;
    plan.forward(data);
    plan.inverse(data);
    for (std::size_t i = 0; i < data.size(); ++i) ASSERT_LT(std::abs(data[i] - original[i]), 1e-13);
  }
}

TEST(Fft, SingleModeLandsOnItsBin) {
  const std::size_t n = 32;
  FftPlan plan({n});
  ComplexVector data(n);
  for (std::size_t j = 0; j < n; ++j) data[j] = std::polar(1.0, 2.0 * std::numbers::pi * 3.0 * j / n);
  plan.forward(data);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(data[k]), k == 3 ? double(n) : 0.0, 1e-10);
}

TEST(Fft, PartialAxesTransformOnlyThoseAxes) {
  // Transforming axis 1 of a (2, 8) grid equals two independent 1D transforms.
  FftPlan partial({2, 8}, {1});
  FftPlan row({8});
  SeededRng rng(9, Stream::Init);
  ComplexVector grid(16);
  for (auto& z : grid) z = {rng.uniform01(), rng.uniform01()};
  ComplexVector r0(grid.begin(), grid.begin() + 8), r1(grid.begin() + 8, grid.end());
  partial.forward(grid);
  row.forward(r0);
  row.forward(r1);
  for (std::size_t j = 0; j < 8; ++j) {
    EXPECT_LT(std::abs(grid[j] - r0[j]), 1e-13);
    EXPECT_LT(std::abs(grid[8 + j] - r1[j]), 1e-13);
  }
}

TEST(Fft, FrequencyIndexAndSupport) {
  EXPECT_EQ(fft_frequency(0, 8), 0);
  EXPECT_EQ(fft_frequency(3, 8), 3);
  EXPECT_EQ(fft_frequency(4, 8), -4);
  EXPECT_EQ(fft_frequency(7, 8), -1);
  EXPECT_TRUE(fft_size_supported(64));
  EXPECT_FALSE(fft_size_supported(48));
  EXPECT_FALSE(fft_size_supported(0));
}

TEST(Fft, GridHelpersValidateShape) {
  ComplexGrid g({4, 4}, {1.0, 1.0});
  g.values[5] = 1.0;
  const ComplexGrid back = fft_inverse(fft_forward(g));
  EXPECT_LT(std::abs(back.values[5] - Complex(1.0)), 1e-14);
  g.values.resize(3);
  EXPECT_THROW(g.validate(), ArgumentError);
}

TEST(Interp, ExactAtNodesAndLinearBetween) {
  RealGrid2D f(4, 4, 4.0, 4.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) f.at(i, j) = static_cast<double>(10 * i + j);
  EXPECT_DOUBLE_EQ(bilinear_interpolate(f, 1.0, 2.0), 12.0);
  EXPECT_DOUBLE_EQ(bilinear_interpolate(f, 1.5, 2.0), 17.0);
  EXPECT_DOUBLE_EQ(bilinear_interpolate(f, 1.5, 2.5), 17.5);
  // Periodic wrap between the last and first node.
  EXPECT_DOUBLE_EQ(bilinear_interpolate(f, 3.5, 0.0), 15.0);
  EXPECT_DOUBLE_EQ(bilinear_interpolate(f, -0.5, 0.0), 15.0);
  EXPECT_THROW(bilinear_interpolate(f, std::nan(""), 0.0), ArgumentError);
}

TEST(SmallMatrix, InverseAndSingular) {
  SmallMatrix m(3);
  const double v[9] = {4, 1, 0, 1, 3, 1, 0, 1, 2};
  for (int i = 0; i < 9; ++i) m.a[i / 3 * 3 + i % 3] = v[i];
  EXPECT_LT(distance_from_identity(m * invert_small_matrix(m)), 1e-14);
  EXPECT_NEAR(determinant(m), 18.0, 1e-12);
  SmallMatrix s(2);
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(1, 0) = 2;
  s(1, 1) = 4;
  EXPECT_THROW(invert_small_matrix(s), SingularMatrixError);
}

TEST(SmallMatrix, SolveSystem) {
  SmallMatrix m(3);
  const double v[9] = {0, 2, 1, 1, 3, 1, 4, 1, 2};
  for (int i = 0; i < 9; ++i) m.a[i / 3 * 3 + i % 3] = v[i];
  const SmallVector b{1.0, -2.0, 0.5};
  const SmallVector x = solve_small_system(m, b);
  const SmallVector back = m * x;
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(back[k], b[k], 1e-14);
  // Diagonal systems divide exactly, with no reciprocal rounding.
  const SmallMatrix d = SmallMatrix::scalar(2, 3.7);
  const SmallVector f{0.1, -2.9, 0.0};
  const SmallVector a = solve_small_system(d, f);
  EXPECT_EQ(a[0], 0.1 / 3.7);
  EXPECT_EQ(a[1], -2.9 / 3.7);
  SmallMatrix s(2);
  s(0, 0) = 1;
  s(0, 1) = s(1, 0) = 2;
  s(1, 1) = 4;
  EXPECT_THROW(solve_small_system(s, f), SingularMatrixError);
}

TEST(SmallMatrix, SymmetricEigenvalues) {
  SmallMatrix m(2);
  m(0, 0) = 2;
  m(0, 1) = m(1, 0) = 1;
  m(1, 1) = 2;
  const auto e = symmetric_eigenvalues(m);
  EXPECT_NEAR(e[0], 1.0, 1e-12);
  EXPECT_NEAR(e[1], 3.0, 1e-12);
  SmallMatrix d = SmallMatrix::identity(3);
  d(0, 0) = 5;
  d(2, 2) = -1;
  const auto e3 = symmetric_eigenvalues(d);
  EXPECT_NEAR(e3[0], -1.0, 1e-12);
  EXPECT_NEAR(e3[1], 1.0, 1e-12);
  EXPECT_NEAR(e3[2], 5.0, 1e-12);
}
