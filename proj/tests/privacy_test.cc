//
// Copyright 2026 The expmech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "expmech/privacy.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracles.h"

namespace expmech {
namespace {

TEST(NormalCdfTest, KnownValues) {
  EXPECT_EQ(NormalCdf(0), 0.5);
  EXPECT_NEAR(NormalCdf(40), 1.0, 1e-15);
  EXPECT_GE(NormalCdf(-40), 0);
  EXPECT_NEAR(NormalCdf(0.5), 0.6914624612740131, 1e-16);
}

TEST(NormalCdfTest, MatchesErfcOracle) {
  for (double x = -30; x <= 10; x += 0.37) {
    const double expected = oracle::Cdf(x);
    EXPECT_NEAR(NormalCdf(x), expected, 1e-15 * std::max(1e-300, expected))
        << "x = " << x;
  }
}

TEST(NormalCdfTest, LogCdfHandlesDeepTail) {
  for (double x : {-5.0, -20.0, -37.0}) {
    EXPECT_NEAR(LogNormalCdf(x), std::log(oracle::Cdf(x)), 1e-12 * std::abs(x * x));
  }
  // Far enough out that the CDF itself underflows.
  const double x = -60;
  const double asymptotic = -0.5 * x * x - std::log(-x) - 0.5 * std::log(2 * M_PI);
  EXPECT_NEAR(LogNormalCdf(x), asymptotic, 1e-3);
  EXPECT_EQ(NormalCdf(x), 0.0);
}

TEST(NormalQuantileTest, InvertsCdf) {
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1 - 1e-9}) {
    EXPECT_NEAR(NormalCdf(NormalQuantile(p)), p, 1e-14 * std::max(p, 1e-3))
        << "p = " << p;
  }
  EXPECT_EQ(NormalQuantile(0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(NormalQuantile(1), std::numeric_limits<double>::infinity());
}

TEST(GaussianDeltaTest, KnownValues) {
  EXPECT_EQ(GaussianDelta({0}, 1), 0);
  EXPECT_NEAR(GaussianDelta({1}, 0), 0.3829249225480263, 1e-15);
  EXPECT_NEAR(GaussianDelta({1}, 0), 2 * oracle::Cdf(0.5) - 1, 1e-15);
  EXPECT_LE(GaussianDelta({1}, 4), GaussianDelta({1}, 1));
}

TEST(GaussianDeltaTest, MatchesHockeyStickQuadrature) {
  for (double s : {0.05, 0.3, 1.0, 2.5, 6.0}) {
    for (double eps : {0.0, 0.01, 0.2, 1.0, 3.0, 8.0}) {
      EXPECT_NEAR(GaussianDelta({s}, eps), oracle::HockeyStick(s, eps), 1e-10)
          << "s = " << s << ", eps = " << eps;
    }
  }
}

TEST(GaussianDeltaTest, LargeEpsilonDoesNotOverflow) {
  const double d = GaussianDelta({3}, 800);
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_GE(d, 0);
  EXPECT_LE(d, 1e-300);
}

TEST(GaussianDeltaTest, MonotoneInEpsilonAndShift) {
  for (double s : {0.1, 0.7, 2.0}) {
    double previous = 1;
    for (double eps = 0; eps <= 6; eps += 0.25) {
      const double d = GaussianDelta({s}, eps);
      EXPECT_LE(d, previous + 1e-16);
      EXPECT_GE(d, 0);
      previous = d;
    }
  }
  for (double eps : {0.1, 1.0, 3.0}) {
    double previous = 0;
    for (double s = 0.05; s <= 5; s += 0.15) {
      const double d = GaussianDelta({s}, eps);
      EXPECT_GE(d, previous - 1e-16);
      previous = d;
    }
  }
}

TEST(GaussianTradeoffTest, KnownValues) {
  for (double z : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    EXPECT_NEAR(GaussianTradeoff({0}, z), 1 - z, 1e-15);
  }
  EXPECT_NEAR(GaussianTradeoff({1}, 0.5), 0.15865525393145707, 1e-15);
  EXPECT_LE(GaussianTradeoff({2}, 0.5), GaussianTradeoff({1}, 0.5));
}

TEST(GaussianTradeoffTest, MatchesNeymanPearsonQuadrature) {
  for (double s : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    for (double z : {1e-6, 0.001, 0.05, 0.3, 0.5, 0.7, 0.95, 0.999}) {
      EXPECT_NEAR(GaussianTradeoff({s}, z), oracle::Tradeoff(s, z), 1e-10)
          << "s = " << s << ", z = " << z;
    }
  }
}

TEST(GaussianTradeoffTest, IsATradeoffFunction) {
  for (double s : {0.2, 1.0, 3.0}) {
    double previous = 1;
    for (double z = 0; z <= 1; z += 0.01) {
      const double t = GaussianTradeoff({s}, z);
      EXPECT_LE(t, 1 - z + 1e-15);
      EXPECT_LE(t, previous + 1e-15);
      previous = t;
    }
  }
}

TEST(CalibrateShiftTest, UnitEpsilonQuarterDelta) {
  absl::StatusOr<GaussianShift> s = CalibrateShift({1, 0.25});
  ASSERT_TRUE(s.ok()) << s.status();
  const double expected =
      std::sqrt(2 * std::log(2) + 2) - std::sqrt(2 * std::log(2));
  EXPECT_NEAR(s->s, expected, 1e-15);
  EXPECT_NEAR(s->s, 0.66277865289797, 1e-13);
  EXPECT_LE(GaussianDelta(*s, 1), 0.25);
}

TEST(CalibrateShiftTest, SmallDelta) {
  absl::StatusOr<GaussianShift> s = CalibrateShift({0.5, 1e-6});
  ASSERT_TRUE(s.ok());
  EXPECT_GT(s->s, 0);
  EXPECT_LE(GaussianDelta(*s, 0.5), 1e-6);
}

TEST(CalibrateShiftTest, VanishesWithEpsilon) {
  double previous = std::numeric_limits<double>::infinity();
  for (double eps = 1; eps > 1e-9; eps /= 10) {
    absl::StatusOr<GaussianShift> s = CalibrateShift({eps, 1e-3});
    ASSERT_TRUE(s.ok());
    EXPECT_LT(s->s, previous);
    previous = s->s;
  }
  EXPECT_LT(previous, 1e-8);
}

TEST(CalibrateShiftTest, RandomBudgetsAreSound) {
  std::mt19937_64 gen(20260214);
  std::uniform_real_distribution<double> eps_dist(0.01, 5);
  std::uniform_real_distribution<double> log_delta(std::log(1e-9), std::log(0.4));
  for (int i = 0; i < 200; ++i) {
    const PrivacyBudget budget{eps_dist(gen), std::exp(log_delta(gen))};
    absl::StatusOr<GaussianShift> s = CalibrateShift(budget);
    ASSERT_TRUE(s.ok()) << s.status();
    EXPECT_LE(GaussianDelta(*s, budget.epsilon), budget.delta);
    absl::StatusOr<GaussianShift> tight = CalibrateShift(budget, true);
    ASSERT_TRUE(tight.ok()) << tight.status();
    EXPECT_GE(tight->s, s->s);
    EXPECT_LE(GaussianDelta(*tight, budget.epsilon), budget.delta);
    // Bisection is tight: a slightly larger shift breaks the budget.
    EXPECT_GT(GaussianDelta({tight->s * (1 + 1e-6)}, budget.epsilon),
              budget.delta);
  }
}

TEST(CalibrateShiftTest, RejectsInvalidBudgets) {
  EXPECT_FALSE(CalibrateShift({1, 0.5}).ok());
  EXPECT_FALSE(CalibrateShift({1, 0.7}).ok());
  EXPECT_FALSE(CalibrateShift({0, 1e-3}).ok());
  EXPECT_FALSE(CalibrateShift({-1, 1e-3}).ok());
  EXPECT_FALSE(CalibrateShift({1, 0}).ok());
}

TEST(DivergenceBoundsTest, KnownValues) {
  absl::StatusOr<DivergenceBounds> b = ComputeDivergenceBounds(2, 1, 1, 2);
  ASSERT_TRUE(b.ok());
  EXPECT_DOUBLE_EQ(b->renyi.value, 2.0);
  EXPECT_DOUBLE_EQ(b->kl.value, 1.0);
  EXPECT_EQ(b->renyi.order, 2);

  b = ComputeDivergenceBounds(1, 0, 1, 3);
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(b->renyi.value, 0);
  EXPECT_EQ(b->kl.value, 0);

  b = ComputeDivergenceBounds(8, 0.5, 2, 1.5);
  ASSERT_TRUE(b.ok());
  EXPECT_DOUBLE_EQ(b->renyi.value, 0.75);
  EXPECT_DOUBLE_EQ(b->kl.value, 0.5);
}

TEST(DivergenceBoundsTest, RejectsBadArguments) {
  EXPECT_FALSE(ComputeDivergenceBounds(0, 1, 1, 2).ok());
  EXPECT_FALSE(ComputeDivergenceBounds(1, -1, 1, 2).ok());
  EXPECT_FALSE(ComputeDivergenceBounds(1, 1, 0, 2).ok());
  EXPECT_FALSE(ComputeDivergenceBounds(1, 1, 1, 1).ok());
}

TEST(PrivacyBudgetTest, Validate) {
  EXPECT_TRUE((PrivacyBudget{0, 0.5}).Validate().ok());
  EXPECT_FALSE((PrivacyBudget{-0.1, 0.5}).Validate().ok());
  EXPECT_FALSE((PrivacyBudget{1, 0}).Validate().ok());
  EXPECT_FALSE((PrivacyBudget{1, 1}).Validate().ok());
}

}  // namespace
}  // namespace expmech
