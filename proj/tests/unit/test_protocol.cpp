#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "madphys/core/error.hpp"
#include "madphys/numerics/rng.hpp"
#include "madphys/protocol/clock.hpp"
#include "madphys/protocol/fidelity.hpp"
#include "madphys/protocol/format.hpp"
#include "madphys/protocol/ledger.hpp"
#include "madphys/protocol/metrics.hpp"
#include "madphys/protocol/query.hpp"

using namespace madphys;
using namespace madphys::protocol;

TEST(Format, BudgetLines) {
  EXPECT_EQ(budget_line(200.0), "You have 200.0 units of budget left.");
  EXPECT_EQ(budget_line(170.0), "You have 170.0 units of budget left.");
  EXPECT_EQ(budget_line(1.0), "You have 1.0 units of budget left.");
  EXPECT_EQ(format_budget(2.5), "2.5");
  EXPECT_EQ(format_fixed(-8.808123, 5), "-8.80812");
  EXPECT_EQ(format_fixed(-0.000001, 5), "0.00000");
}

TEST(Fidelity, ParseIsCaseInsensitive) {
  EXPECT_EQ(parse_fidelity("HIGH"), Fidelity::High);
  EXPECT_EQ(parse_fidelity("Medium"), Fidelity::Medium);
  EXPECT_EQ(parse_fidelity("low"), Fidelity::Low);
  EXPECT_FALSE(parse_fidelity("ultra").has_value());
  EXPECT_STREQ(to_string(Fidelity::Medium), "medium");
}

TEST(Fidelity, CostTable) {
  const CostModel m;
  const std::vector<Fidelity> three_high(3, Fidelity::High);
  EXPECT_EQ(cost_of(three_high, m), 30.0);
  const std::vector<Fidelity> mixed{Fidelity::High, Fidelity::Medium, Fidelity::Low, Fidelity::Low};
  EXPECT_EQ(cost_of(mixed, m), 19.0);
  EXPECT_EQ(m.min_cost(), 2.0);
  EXPECT_THROW(cost_of(std::vector<Fidelity>{}, m), ProtocolError);
}

TEST(Fidelity, ValidateRejectsNonMonotoneTables) {
  CostModel m;
  EXPECT_NO_THROW(m.validate());
  m.cost = {5.0, 2.0, 10.0};
  EXPECT_THROW(m.validate(), ConfigError);
  m = CostModel{};
  m.noise_sigma = {0.01, 0.1, 0.001};
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(Fidelity, NoiseStandardDeviation) {
  const CostModel m;
  for (Fidelity f : kAllFidelities) {
    numerics::SeededRng rng(17, numerics::Stream::Noise);
    const std::vector<double> zeros(20000, 0.0);
    const std::vector<Fidelity> fids(zeros.size(), f);
    const auto noisy = apply_observation_noise(zeros, fids, m, rng);
    double sq = 0.0;
    for (double v : noisy) sq += v * v;
    EXPECT_NEAR(std::sqrt(sq / noisy.size()), m.sigma(f), 0.03 * m.sigma(f));
  }
}

TEST(Ledger, ThirtyCostSequence) {
  BudgetLedger ledger(200.0);
  std::vector<double> remaining;
  for (int i = 0; i < 6; ++i) {
    ledger.charge(30.0);
    remaining.push_back(ledger.remaining());
  }
  EXPECT_EQ(remaining, (std::vector<double>{170, 140, 110, 80, 50, 20}));
  try {
    ledger.charge(30.0);
    FAIL() << "expected InsufficientBudget";
  } catch (const InsufficientBudget& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientBudget);
    EXPECT_EQ(e.requested(), 30.0);
    EXPECT_EQ(e.remaining(), 20.0);
  }
  EXPECT_EQ(ledger.remaining(), 20.0);
  EXPECT_TRUE(ledger.can_afford(19.0));
  ledger.charge(19.0);
  EXPECT_EQ(budget_line(ledger.remaining()), "You have 1.0 units of budget left.");
  EXPECT_FALSE(ledger.can_afford(2.0));
  EXPECT_EQ(ledger.entries().size(), 7u);
  EXPECT_THROW(ledger.charge(0.0), ArgumentError);
}

TEST(Ledger, SpentNeverExceedsTotal) {
  numerics::SeededRng rng(2, numerics::Stream::Agent);
  BudgetLedger ledger(200.0);
  for (int i = 0; i < 500; ++i) {
    const double cost = static_cast<double>(1 + rng.uniform_index(40));
    try {
      ledger.charge(cost);
    } catch (const InsufficientBudget&) {
    }
    ASSERT_LE(ledger.spent(), ledger.total());
  }
}

TEST(Clock, QuantizesToNearestStepWithMinimumOne) {
  const Clock c(0.001, 300.0);
  EXPECT_EQ(c.max_steps(), 300000);
  EXPECT_EQ(c.steps_for(0.1), 100);
  EXPECT_EQ(c.steps_for(0.00049), 1);
  EXPECT_EQ(c.steps_for(0.0016), 2);
  EXPECT_THROW(c.steps_for(0.0), ProtocolError);
  EXPECT_THROW(c.steps_for(-1.0), ProtocolError);
  EXPECT_THROW(c.steps_for(std::nan("")), ProtocolError);
  const Clock later = c.advanced(1.5);
  EXPECT_EQ(later.step_count(), 1500);
  EXPECT_DOUBLE_EQ(later.time(), 1.5);
}

TEST(Clock, TimeLimit) {
  const Clock c(0.005, 30.0);
  EXPECT_EQ(c.max_steps(), 6000);
  EXPECT_NO_THROW(c.advanced(30.0));
  try {
    c.advanced(30.01);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::TimeLimit);
  }
  EXPECT_THROW(Clock(0.0, 1.0), ConfigError);
}

TEST(Metrics, Normalizers) {
  const std::vector<double> lo{-10, -10}, hi{10, 10};
  EXPECT_NEAR(box_diagonal(lo, hi), 28.2843, 5e-5);
  const std::vector<double> a{1, 2, 3}, b{1, 2, 3};
  EXPECT_EQ(nrmse(a, b, 28.0), 0.0);
  EXPECT_EQ(l2_error(a, b), 0.0);
  const std::vector<double> d{3, 4}, z{0, 0};
  EXPECT_DOUBLE_EQ(l2_error(d, z), 5.0);
  // rmse = sqrt((9 + 16) / 2)
  EXPECT_DOUBLE_EQ(nrmse(d, z, 2.0), std::sqrt(12.5) / 2.0);
  EXPECT_THROW(l2_error(a, d), ArgumentError);
}

TEST(Metrics, NoClipping) {
  const std::vector<double> far{1e6, 0}, zero{0, 0};
  EXPECT_GT(nrmse(far, zero, 28.28), 1e4);
}

TEST(Query, TimesLieBeyondTheWindow) {
  numerics::SeededRng rng(4, numerics::Stream::Query);
  for (int i = 0; i < 10000; ++i) {
    const double t = sample_query(30.0, 1.2, rng);
    ASSERT_GT(t, 30.0);
    ASSERT_LE(t, 36.0);
    ASSERT_GT(query_step(t, 0.005, 6000), 6000);
  }
  EXPECT_THROW(sample_query(30.0, 1.0, rng), ConfigError);
  EXPECT_EQ(query_step(30.0001, 0.005, 6000), 6001);
  EXPECT_EQ(query_step(31.0, 0.005, 6000), 6200);
}
