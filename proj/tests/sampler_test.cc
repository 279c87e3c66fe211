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

#include "expmech/sampler.h"

#include <cmath>
#include <vector>

#include "expmech/verify.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace expmech {
namespace {

Vector Scalar(double v) { return Vector::Constant(1, v); }

Dataset OneSample(Vector s) {
  Dataset data;
  data.samples.push_back(std::move(s));
  return data;
}

struct Moments {
  double mean = 0;
  double var = 0;
};

Moments SampleMoments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= v.size();
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= v.size() - 1;
  return m;
}

// Independent recomputation of the step-size caps and the step count.
double ExpectedEta(double g, double mu, const SamplerSchedule& s) {
  const ScheduleConstants& c = s.constants;
  double eta = 1 / mu;
  if (g > 0) {
    eta = std::min(eta, c.eta_concentration /
                            (g * g * std::log(400 / s.delta_inner)));
    eta = std::min(eta, c.eta_series / (g * g * s.series_threshold));
  }
  return eta;
}

std::int64_t ExpectedSteps(double mu, int d, const SamplerSchedule& s) {
  const double log_term =
      std::log((d / mu + s.d_init * s.d_init) / (s.eta * s.delta_tv));
  return static_cast<std::int64_t>(
      std::ceil(s.constants.c_t / (s.eta * mu) * log_term));
}

TEST(DeriveScheduleTest, PinnedExampleSatisfiesEveryCap) {
  absl::StatusOr<SamplerSchedule> s =
      DeriveSchedule(1, 1, 0.01, Scalar(0), 1, 1, ScheduleConstants::Pinned());
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_TRUE(s->VerifyCaps(1, 1).ok());
  EXPECT_LE(s->eta, 1.0);
  EXPECT_LE(s->eta, std::ldexp(1, -6) / std::log(400 / s->delta_inner) * (1 + 1e-12));
  EXPECT_LE(s->eta, std::ldexp(1, -8) / s->series_threshold * (1 + 1e-12));
  EXPECT_DOUBLE_EQ(s->eta, ExpectedEta(1, 1, *s));
  EXPECT_EQ(s->outer_steps, ExpectedSteps(1, 1, *s));
  EXPECT_DOUBLE_EQ(s->delta_inner, 0.01 / (2.0 * s->outer_steps));
  EXPECT_EQ(s->series_threshold,
            static_cast<std::int64_t>(std::ceil(8 * std::log(1 / s->delta_inner))));
}

TEST(DeriveScheduleTest, FixedPointOnAGrid) {
  for (double g : {0.5, 1.0, 4.0}) {
    for (double mu : {0.1, 1.0, 10.0}) {
      for (double dtv : {1e-4, 0.01, 0.2}) {
        for (int d : {1, 5}) {
          for (const ScheduleConstants& c :
               {ScheduleConstants::Pinned(), ScheduleConstants::Desk()}) {
            absl::StatusOr<SamplerSchedule> s =
                DeriveSchedule(g, mu, dtv, Vector::Zero(d), 2, d, c);
            ASSERT_TRUE(s.ok()) << s.status();
            EXPECT_TRUE(s->VerifyCaps(g, mu).ok());
            EXPECT_LE(s->rounds, 10);
            EXPECT_DOUBLE_EQ(s->eta, ExpectedEta(g, mu, *s));
            EXPECT_EQ(s->outer_steps, ExpectedSteps(mu, d, *s));
          }
        }
      }
    }
  }
}

TEST(DeriveScheduleTest, StepsNonincreasingInMuWhileLipschitzCapsBind) {
  std::int64_t previous = std::numeric_limits<std::int64_t>::max();
  for (double mu = 0.05; mu <= 50; mu *= 1.5) {
    absl::StatusOr<SamplerSchedule> s =
        DeriveSchedule(1, mu, 0.01, Scalar(0), 1, 1);
    ASSERT_TRUE(s.ok());
    ASSERT_LT(s->eta, 1 / mu) << "1/mu cap binds at mu = " << mu;
    EXPECT_LE(s->outer_steps, previous) << "mu = " << mu;
    previous = s->outer_steps;
  }
}

TEST(DeriveScheduleTest, DoublingLipschitzQuartersEta) {
  const SamplerSchedule a = *DeriveSchedule(1, 1, 0.01, Scalar(0), 1, 1);
  const SamplerSchedule b = *DeriveSchedule(2, 1, 0.01, Scalar(0), 1, 1);
  // Exactly 4 at a fixed delta_inner; the larger T shrinks delta_inner and
  // adds a logarithmic factor on top.
  EXPECT_GE(a.eta / b.eta, 4 * (1 - 1e-12));
  EXPECT_LE(a.eta / b.eta, 4.5);
  const double ratio = static_cast<double>(b.outer_steps) / a.outer_steps;
  EXPECT_GE(ratio, 4);
  EXPECT_LE(ratio, 5);
}

TEST(DeriveScheduleTest, ZeroLipschitzLeavesOnlyTheMuCap) {
  absl::StatusOr<SamplerSchedule> s = DeriveSchedule(0, 2, 0.01, Scalar(0), 1, 1);
  ASSERT_TRUE(s.ok());
  EXPECT_DOUBLE_EQ(s->eta, 0.5);
  EXPECT_TRUE(s->VerifyCaps(0, 2).ok());
}

TEST(DeriveScheduleTest, RejectsBadInputs) {
  EXPECT_FALSE(DeriveSchedule(-1, 1, 0.01, Scalar(0), 1, 1).ok());
  EXPECT_FALSE(DeriveSchedule(1, 0, 0.01, Scalar(0), 1, 1).ok());
  EXPECT_FALSE(DeriveSchedule(1, 1, 0, Scalar(0), 1, 1).ok());
  EXPECT_FALSE(DeriveSchedule(1, 1, 0.5, Scalar(0), 1, 1).ok());
  EXPECT_FALSE(DeriveSchedule(1, 1, 0.01, Vector::Zero(2), 1, 1).ok());
  EXPECT_FALSE(DeriveSchedule(1, 1, 0.01, Scalar(0), -1, 1).ok());
  ScheduleConstants bad;
  bad.c_t = 0;
  EXPECT_FALSE(DeriveSchedule(1, 1, 0.01, Scalar(0), 1, 1, bad).ok());
}

TEST(VerifyCapsTest, DetectsTampering) {
  SamplerSchedule s = *DeriveSchedule(1, 1, 0.01, Scalar(0), 1, 1);
  SamplerSchedule wide = s;
  wide.eta *= 1.01;
  EXPECT_FALSE(wide.VerifyCaps(1, 1).ok());
  SamplerSchedule stale = s;
  stale.outer_steps += 1;
  EXPECT_FALSE(stale.VerifyCaps(1, 1).ok());
  EXPECT_FALSE(s.VerifyCaps(2, 1).ok());
}

TEST(BaseGaussianDrawTest, UnregularisedWholeSpaceMoments) {
  const ConvexBody all = *ConvexBody::AllOf(2);
  Vector y(2);
  y << 0.3, -1.2;
  const double eta = 0.25;
  Rng rng(1);
  constexpr int kDraws = 100000;
  std::vector<double> x0, x1;
  double cross = 0;
  for (int i = 0; i < kDraws; ++i) {
    absl::StatusOr<Vector> x = BaseGaussianDraw({0}, all, y, eta, rng);
    ASSERT_TRUE(x.ok());
    x0.push_back((*x)[0]);
    x1.push_back((*x)[1]);
    cross += ((*x)[0] - y[0]) * ((*x)[1] - y[1]);
  }
  const Moments m0 = SampleMoments(x0), m1 = SampleMoments(x1);
  const double se_mean = std::sqrt(eta / kDraws);
  const double se_var = eta * std::sqrt(2.0 / kDraws);
  EXPECT_NEAR(m0.mean, y[0], 4 * se_mean);
  EXPECT_NEAR(m1.mean, y[1], 4 * se_mean);
  EXPECT_NEAR(m0.var, eta, 4 * se_var);
  EXPECT_NEAR(m1.var, eta, 4 * se_var);
  EXPECT_NEAR(cross / kDraws, 0, 4 * eta / std::sqrt(1.0 * kDraws));
}

TEST(BaseGaussianDrawTest, RegularisedVariance) {
  const ConvexBody all = *ConvexBody::AllOf(1);
  const double eta = 0.5, mu = 3;
  Rng rng(2);
  constexpr int kDraws = 100000;
  std::vector<double> xs;
  for (int i = 0; i < kDraws; ++i) {
    xs.push_back((*BaseGaussianDraw({mu}, all, Scalar(0), eta, rng))[0]);
  }
  const Moments m = SampleMoments(xs);
  const double var = eta / (1 + eta * mu);
  EXPECT_NEAR(m.mean, 0, 4 * std::sqrt(var / kDraws));
  EXPECT_NEAR(m.var, var, 4 * var * std::sqrt(2.0 / kDraws));
}

// Mean and variance of N(m, sd^2) conditioned on [lo, hi], by quadrature.
Moments TruncatedMoments(double m, double sd, double lo, double hi) {
  // Factor out the density at the nearest end to keep the far tail finite.
  const double anchor = std::clamp(m, lo, hi);
  auto w = [&](double x) {
    return std::exp(-((x - m) * (x - m) - (anchor - m) * (anchor - m)) /
                    (2 * sd * sd));
  };
  const double z = oracle::IntegrateFinite(w, lo, hi);
  const double mean =
      oracle::IntegrateFinite([&](double x) { return x * w(x); }, lo, hi) / z;
  const double var = oracle::IntegrateFinite(
                         [&](double x) { return (x - mean) * (x - mean) * w(x); },
                         lo, hi) /
                     z;
  return {mean, var};
}

TEST(BaseGaussianDrawTest, BoxDrawsMatchTruncatedGaussianDeepInTheTail) {
  // The mean sits 12 standard deviations to the right of the box, where plain
  // rejection would essentially never accept.
  Vector lo(2), hi(2), y(2);
  lo << -1, -1;
  hi << 1, 1;
  const double eta = 0.01;
  y << 1 + 12 * std::sqrt(eta), 0.2;
  const ConvexBody box = *ConvexBody::MakeBox(lo, hi);
  Rng rng(3);
  constexpr int kDraws = 50000;
  std::vector<double> a, b;
  for (int i = 0; i < kDraws; ++i) {
    Vector x;
    absl::StatusOr<std::int64_t> attempts =
        BaseGaussianDraw({0}, box, y, eta, rng, x);
    ASSERT_TRUE(attempts.ok());
    ASSERT_TRUE(box.ContainsPoint(x));
    a.push_back(x[0]);
    b.push_back(x[1]);
  }
  const double sd = std::sqrt(eta);
  for (auto [samples, m] : {std::pair{&a, y[0]}, std::pair{&b, y[1]}}) {
    const Moments expected = TruncatedMoments(m, sd, -1, 1);
    const Moments got = SampleMoments(*samples);
    EXPECT_NEAR(got.mean, expected.mean, 4 * std::sqrt(expected.var / kDraws));
    EXPECT_NEAR(got.var, expected.var, 6 * expected.var * std::sqrt(2.0 / kDraws));
  }
}

TEST(BaseGaussianDrawTest, BallDrawsMatchTruncatedGaussianDeepInTheTail) {
  // Unit disc, Gaussian centred 8 standard deviations outside along (3, 4)/5.
  const double sd = 0.05;
  const double a = 1 + 8 * sd;
  Vector u(2);
  u << 0.6, 0.8;
  const Vector y = a * u;
  const ConvexBody disc = *ConvexBody::CenteredBall(2, 1);
  // Along u the law has weight exp(-(t-a)^2/2sd^2) (2 Phi(h(t)/sd) - 1),
  // h(t) = sqrt(1 - t^2) the half chord; the orthogonal part is symmetric.
  auto w = [&](double t) {
    const double h = std::sqrt(std::max(0.0, 1 - t * t));
    return std::exp(-((t - a) * (t - a) - (1 - a) * (1 - a)) / (2 * sd * sd)) *
           (2 * oracle::Cdf(h / sd) - 1);
  };
  const double lo = 1 - 40 * sd * sd / (a - 1);
  const double z = oracle::IntegrateFinite(w, lo, 1);
  const double mean_t =
      oracle::IntegrateFinite([&](double t) { return t * w(t); }, lo, 1) / z;

  Rng rng(4);
  constexpr int kDraws = 50000;
  std::vector<double> along, across;
  std::int64_t proposals = 0;
  for (int i = 0; i < kDraws; ++i) {
    Vector x;
    absl::StatusOr<std::int64_t> n = BaseGaussianDraw({0}, disc, y, sd * sd, rng, x);
    ASSERT_TRUE(n.ok()) << n.status();
    proposals += *n;
    ASSERT_LE(x.norm(), 1 + 1e-12);
    along.push_back(x.dot(u));
    across.push_back(x[0] * u[1] - x[1] * u[0]);
  }
  const Moments t = SampleMoments(along);
  const Moments p = SampleMoments(across);
  EXPECT_NEAR(t.mean, mean_t, 4 * std::sqrt(t.var / kDraws));
  EXPECT_NEAR(p.mean, 0, 4 * std::sqrt(p.var / kDraws));
  EXPECT_LT(static_cast<double>(proposals) / kDraws, 1.5);
}

TEST(BaseGaussianDrawTest, TinyBallFarAwayAborts) {
  Vector c = Vector::Constant(3, 5);
  const ConvexBody speck = *ConvexBody::L2Ball(c, 1e-4);
  Rng rng(5);
  Vector x;
  absl::StatusOr<std::int64_t> n =
      BaseGaussianDraw({0}, speck, Vector::Zero(3), 1, rng, x, 1000);
  ASSERT_FALSE(n.ok());
  EXPECT_TRUE(absl::IsResourceExhausted(n.status()));
  EXPECT_NE(n.status().message().find("acceptance"), std::string::npos);
}

TEST(BaseGaussianDrawTest, RejectsBadArguments) {
  const ConvexBody all = *ConvexBody::AllOf(1);
  Rng rng(6);
  EXPECT_FALSE(BaseGaussianDraw({0}, all, Scalar(0), 0, rng).ok());
  EXPECT_FALSE(BaseGaussianDraw({-1}, all, Scalar(0), 1, rng).ok());
  EXPECT_FALSE(BaseGaussianDraw({0}, all, Vector::Zero(2), 1, rng).ok());
}

TEST(BaseGaussianDrawTest, ConcentrationOfLinearFunctional) {
  const ConvexBody box = *ConvexBody::Cube(2, -1, 1);
  const double eta = 0.04;
  Vector y(2);
  y << 0.9, -0.5;
  Vector g(2);
  g << 3, -4;  // |g| = 5
  Rng rng(7);
  std::vector<double> values;
  for (int i = 0; i < 100000; ++i) {
    values.push_back(g.dot(*BaseGaussianDraw({1}, box, y, eta, rng)));
  }
  const std::vector<ConcentrationCheck> checks =
      ConcentrationProbe(values, eta / (1 + eta), 5, {0.25, 0.5, 1.0, 1.5});
  for (const ConcentrationCheck& c : checks) {
    EXPECT_TRUE(c.pass) << "t = " << c.t << ": " << c.empirical_tail << " vs "
                        << c.bound;
  }
}

// A single difference f(z) - f(x) = delta via one linear loss and x = 0.
struct ConstantDifference {
  explicit ConstantDifference(double delta)
      : data(OneSample(Scalar(1))),
        oracle(family, data, 1.0, 1.0),
        x(Scalar(0)),
        z(Scalar(delta)) {}
  LossFamily family = LossFamily::Linear();
  Dataset data;
  EmpiricalOracle oracle;
  Vector x;
  Vector z;
};

TEST(UnbiasedExpEstimatorTest, EqualPointsGiveOne) {
  ConstantDifference c(0.0);
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const EstimatorDraw d = UnbiasedExpEstimator(c.oracle, c.x, c.x, rng);
    EXPECT_EQ(d.rho, 1);
    EXPECT_EQ(d.rho_bar, 1);
  }
}

TEST(UnbiasedExpEstimatorTest, MeanIsExponentialOfDifference) {
  for (double delta : {0.1, -0.3, 0.8}) {
    ConstantDifference c(delta);
    Rng rng(9);
    constexpr int kDraws = 1'000'000;
    double sum = 0, sum2 = 0;
    std::int64_t queries = 0, factors = 0;
    for (int i = 0; i < kDraws; ++i) {
      const EstimatorDraw d = UnbiasedExpEstimator(c.oracle, c.x, c.z, rng);
      sum += d.rho;
      sum2 += d.rho * d.rho;
      queries += d.queries_used;
      factors += d.terms_used * (d.terms_used + 1) / 2;
      EXPECT_GE(d.rho_bar, 0);
      EXPECT_LE(d.rho_bar, 2);
    }
    const double mean = sum / kDraws;
    const double se = std::sqrt((sum2 / kDraws - mean * mean) / kDraws);
    EXPECT_NEAR(mean, std::exp(delta), 4 * se) << "delta = " << delta;
    // Two value queries per factor, a stages cost 1 + 2 + ... + a factors.
    EXPECT_EQ(queries, 2 * factors);
  }
}

TEST(UnbiasedExpEstimatorTest, MixtureUsesIndependentIndices) {
  // Differences +0.5 and -0.3 with equal weight: target exp(0.1).
  const LossFamily family = LossFamily::Linear();
  Dataset data;
  data.samples = {Scalar(0.5), Scalar(-0.3)};
  EmpiricalOracle oracle(family, data, 1.0, 0.5);
  Rng rng(10);
  constexpr int kDraws = 1'000'000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double rho = UnbiasedExpEstimator(oracle, Scalar(0), Scalar(1), rng).rho;
    sum += rho;
    sum2 += rho * rho;
  }
  const double mean = sum / kDraws;
  const double se = std::sqrt((sum2 / kDraws - mean * mean) / kDraws);
  EXPECT_NEAR(mean, std::exp(0.1), 4 * se);
}

TEST(UnbiasedExpEstimatorTest, StageReachProbabilityIsInverseFactorial) {
  ConstantDifference c(0.2);
  Rng rng(11);
  constexpr int kDraws = 1'000'000;
  std::vector<int> reached(7, 0);
  for (int i = 0; i < kDraws; ++i) {
    const std::int64_t stages =
        UnbiasedExpEstimator(c.oracle, c.x, c.z, rng).terms_used;
    for (int a = 1; a <= std::min<std::int64_t>(6, stages); ++a) ++reached[a];
  }
  double factorial = 1;
  for (int a = 1; a <= 5; ++a) {
    factorial *= a;
    const double p = 1 / factorial;
    const double freq = static_cast<double>(reached[a]) / kDraws;
    EXPECT_NEAR(freq, p, 3 * std::sqrt(p * (1 - p) / kDraws) + 1e-12)
        << "stage " << a;
  }
}

TEST(RestrictedStepTest, NoLossesAcceptsFirstBaseDraw) {
  const SamplerObjective objective{nullptr, {1}, *ConvexBody::AllOf(1)};
  const SamplerSchedule s = *DeriveSchedule(0, 1, 0.01, Scalar(0), 1, 1);
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    Vector out;
    absl::StatusOr<StepStatistics> stats =
        RestrictedStep(objective, Scalar(0.5), s, rng, out);
    ASSERT_TRUE(stats.ok());
    EXPECT_EQ(stats->attempts, 1);
    EXPECT_EQ(stats->value_queries, 0);
  }
}

TEST(RestrictedStepTest, LinearLossMatchesShiftedGaussian) {
  // exp(-g x - mu x^2/2 - (x - y)^2/(2 eta)) is Gaussian with precision
  // 1/eta + mu and mean (y/eta - g) / (1/eta + mu).
  const double g = 2, mu = 0.5, y = 0.3;
  const LossFamily family = LossFamily::Linear();
  const Dataset data = OneSample(Scalar(g));
  EmpiricalOracle oracle(family, data, 1.0, g);
  const SamplerObjective objective{&oracle, {mu}, *ConvexBody::AllOf(1)};
  SamplerSchedule s = *DeriveSchedule(g, mu, 0.01, Scalar(0), 1, 1);
  const double precision = 1 / s.eta + mu;
  const double mean = (y / s.eta - g) / precision;
  const double sd = 1 / std::sqrt(precision);

  Rng rng(13);
  constexpr int kDraws = 100000;
  std::vector<double> xs;
  std::int64_t attempts = 0, out_of_range = 0, calls = 0;
  for (int i = 0; i < kDraws; ++i) {
    Vector out;
    absl::StatusOr<StepStatistics> stats =
        RestrictedStep(objective, Scalar(y), s, rng, out);
    ASSERT_TRUE(stats.ok());
    attempts += stats->attempts;
    out_of_range += stats->out_of_range;
    calls += stats->estimator_calls;
    xs.push_back(out[0]);
  }
  absl::StatusOr<KsResult> ks =
      KsTest(xs, [&](double x) { return oracle::Cdf((x - mean) / sd); });
  ASSERT_TRUE(ks.ok());
  EXPECT_GT(ks->p_value, 0.001) << "D = " << ks->statistic;
  EXPECT_LE(static_cast<double>(attempts) / kDraws, 6);
  EXPECT_LE(static_cast<double>(out_of_range) / calls, 0.01);
}

TEST(AlternatingSampleTest, ZeroLossesGiveTheRegulariserGaussian) {
  for (int d : {1, 4}) {
    const SamplerObjective objective{nullptr, {1}, *ConvexBody::AllOf(d)};
    const SamplerSchedule s = *DeriveSchedule(
        0, 1, 0.01, Vector::Zero(d), 2 * std::sqrt(1.0 * d), d);
    absl::StatusOr<SamplerReport> report = DrawSamples(objective, s, 14, 10000);
    ASSERT_TRUE(report.ok());
    for (int j = 0; j < d; ++j) {
      std::vector<double> coord;
      for (const Vector& x : report->samples) coord.push_back(x[j]);
      absl::StatusOr<KsResult> ks = KsTest(coord, oracle::Cdf);
      ASSERT_TRUE(ks.ok());
      EXPECT_GT(ks->p_value, 0.01) << "d = " << d << ", coordinate " << j;
    }
  }
}

TEST(AlternatingSampleTest, DrawsStayInBodyAndQueryBudgetIsConstant) {
  const LossFamily family = LossFamily::Linear();
  const Dataset data = OneSample(Scalar(1));
  EmpiricalOracle oracle(family, data, 1.0, 1.0);
  const ConvexBody interval = *ConvexBody::Cube(1, -1, 1);
  const SamplerObjective objective{&oracle, {1}, interval};
  const SamplerSchedule s = *DeriveSchedule(1, 1, 0.01, Scalar(0), 2, 1,
                                            ScheduleConstants::Desk());
  absl::StatusOr<SamplerReport> report = DrawSamples(objective, s, 15, 1000);
  ASSERT_TRUE(report.ok());
  for (const Vector& x : report->samples) EXPECT_TRUE(interval.ContainsPoint(x));
  EXPECT_EQ(report->outer_steps, 1000 * s.outer_steps);
  EXPECT_LE(report->QueriesPerStep(), 32);
  EXPECT_LE(report->MeanInnerAttempts(), 6);
  EXPECT_LE(static_cast<double>(report->out_of_range) / report->estimator_calls,
            0.01);
}

TEST(AlternatingSampleTest, StartOutsideBodyIsRejected) {
  const ConvexBody interval = *ConvexBody::Cube(1, -1, 1);
  const SamplerObjective objective{nullptr, {1}, interval};
  const SamplerSchedule s = *DeriveSchedule(0, 1, 0.01, Scalar(3), 2, 1);
  Rng rng(16);
  EXPECT_FALSE(AlternatingSample(objective, s, rng).ok());
}

TEST(DrawSamplesTest, ResultIndependentOfThreadCount) {
  const LossFamily family = LossFamily::Linear();
  const Dataset data = OneSample(Scalar(1));
  EmpiricalOracle oracle(family, data, 1.0, 1.0);
  const SamplerObjective objective{&oracle, {1}, *ConvexBody::Cube(1, -1, 1)};
  const SamplerSchedule s = *DeriveSchedule(1, 1, 0.1, Scalar(0), 2, 1,
                                            ScheduleConstants::Desk());
  const SamplerReport one = *DrawSamples(objective, s, 17, 40, 1);
  const SamplerReport three = *DrawSamples(objective, s, 17, 40, 3);
  ASSERT_EQ(one.samples.size(), three.samples.size());
  for (std::size_t i = 0; i < one.samples.size(); ++i) {
    EXPECT_EQ(one.samples[i], three.samples[i]);
  }
  EXPECT_EQ(one.total_value_queries, three.total_value_queries);
  EXPECT_EQ(one.inner_attempts_histogram, three.inner_attempts_histogram);
}

TEST(RngTest, TruncatedNormalStaysInsideAndMatchesMoments) {
  Rng rng(18);
  struct Case {
    double lo, hi;
  };
  for (Case c : {Case{-0.2, 0.3}, Case{1, 1.2}, Case{5, 1e300}, Case{-3, 40},
                 Case{-1e300, -7}, Case{-2, 2}}) {
    const double hi = std::min(c.hi, 60.0);
    const double lo = std::max(c.lo, -60.0);
    const Moments expected = TruncatedMoments(0, 1, lo, hi);
    std::vector<double> xs;
    for (int i = 0; i < 40000; ++i) {
      const double z = rng.TruncatedNormal(c.lo, c.hi);
      ASSERT_GE(z, c.lo);
      ASSERT_LE(z, c.hi);
      xs.push_back(z);
    }
    EXPECT_NEAR(SampleMoments(xs).mean, expected.mean,
                4 * std::sqrt(expected.var / xs.size()))
        << "[" << c.lo << ", " << c.hi << "]";
  }
}

}  // namespace
}  // namespace expmech
