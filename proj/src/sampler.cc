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

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "expmech/parallel.h"

namespace expmech {
namespace {

constexpr int kMaxScheduleRounds = 10;

bool WithinRelative(double value, double cap) {
  return value <= cap * (1 + 1e-12);
}

std::int64_t SeriesThreshold(double c_l, double delta_inner) {
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(c_l * std::log(1 / delta_inner))));
}

double StepSize(double lipschitz, double mu, double delta_inner,
                std::int64_t series_threshold, const ScheduleConstants& c) {
  double eta = 1 / mu;
  if (lipschitz > 0) {
    const double g2 = lipschitz * lipschitz;
    eta = std::min(eta,
                   c.eta_concentration / (g2 * std::log(400 / delta_inner)));
    eta = std::min(eta, c.eta_series /
                            (g2 * static_cast<double>(series_threshold)));
  }
  return eta;
}

// Inner loop of RestrictedStep with caller-provided scratch for z.
absl::Status RestrictedStepInto(const SamplerObjective& objective,
                                const Vector& y,
                                const SamplerSchedule& schedule, Rng& rng,
                                Vector& x, Vector& z, StepStatistics& stats) {
  const bool no_losses =
      objective.losses == nullptr || objective.losses->lipschitz() == 0;
  for (std::int64_t attempt = 1; attempt <= kMaxInnerAttempts; ++attempt) {
    stats.attempts = attempt;
    absl::StatusOr<std::int64_t> base =
        BaseGaussianDraw(objective.regularizer, objective.body, y,
                         schedule.eta, rng, x);
    if (!base.ok()) return base.status();
    stats.base_draws += *base;
    // Constant zero losses make rho == 1 and the rejection step a fair coin
    // independent of x, so the first base draw already has the target law.
    if (no_losses) return absl::OkStatus();

    base = BaseGaussianDraw(objective.regularizer, objective.body, y,
                            schedule.eta, rng, z);
    if (!base.ok()) return base.status();
    stats.base_draws += *base;

    const EstimatorDraw draw =
        UnbiasedExpEstimator(*objective.losses, x, z, rng);
    ++stats.estimator_calls;
    stats.value_queries += draw.queries_used;
    if (draw.rho < 0 || draw.rho > 2) ++stats.out_of_range;
    if (rng.Uniform() <= 0.5 * draw.rho) return absl::OkStatus();
  }
  return absl::ResourceExhaustedError(absl::StrCat(
      "restricted step rejected ", kMaxInnerAttempts, " consecutive attempts"));
}

}  // namespace

double EmpiricalOracle::SampleDifference(const Vector& x, const Vector& z,
                                         Rng& rng) const {
  const Vector& s =
      data_.samples[rng.Index(static_cast<std::uint64_t>(data_.size()))];
  double diff = scale_ * (family_.Evaluate(z, s) - family_.Evaluate(x, s));
  if (removed_quadratic_ != 0) {
    diff -= 0.5 * removed_quadratic_ * (z.squaredNorm() - x.squaredNorm());
  }
  return diff;
}

double EmpiricalOracle::MeanValue(const Vector& x) const {
  double total = 0;
  for (const Vector& s : data_.samples) total += family_.Evaluate(x, s);
  return scale_ * total / static_cast<double>(data_.size()) -
         0.5 * removed_quadratic_ * x.squaredNorm();
}

double PopulationOracle::SampleDifference(const Vector& x, const Vector& z,
                                          Rng& rng) const {
  Vector s(population_.mean.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    s[j] = population_.mean[j] + population_.sigma * rng.Normal();
  }
  return scale_ * (family_.Evaluate(z, s) - family_.Evaluate(x, s));
}

absl::Status SamplerSchedule::VerifyCaps(double lipschitz, double mu) const {
  if (!(eta > 0) || outer_steps < 1) {
    return absl::FailedPreconditionError("schedule is not initialised");
  }
  if (!WithinRelative(eta, 1 / mu)) {
    return absl::FailedPreconditionError("eta exceeds 1/mu");
  }
  if (lipschitz > 0) {
    const double g2 = lipschitz * lipschitz;
    if (!WithinRelative(eta, constants.eta_concentration /
                                 (g2 * std::log(400 / delta_inner)))) {
      return absl::FailedPreconditionError(
          "eta exceeds the concentration cap");
    }
    if (!WithinRelative(eta, constants.eta_series /
                                 (g2 * static_cast<double>(series_threshold)))) {
      return absl::FailedPreconditionError("eta exceeds the series cap");
    }
  }
  const double expected_inner =
      delta_tv / (2 * static_cast<double>(outer_steps));
  if (std::abs(delta_inner - expected_inner) > 1e-12 * expected_inner) {
    return absl::FailedPreconditionError("delta_inner != delta_tv / (2T)");
  }
  if (series_threshold != SeriesThreshold(constants.c_l, delta_inner)) {
    return absl::FailedPreconditionError("series threshold out of sync");
  }
  return absl::OkStatus();
}

absl::StatusOr<SamplerSchedule> DeriveSchedule(
    double lipschitz, double mu, double delta_tv, Vector x0, double d_init,
    int dimension, const ScheduleConstants& constants) {
  if (!(lipschitz >= 0) || !std::isfinite(lipschitz)) {
    return absl::InvalidArgumentError("G must be finite and >= 0");
  }
  if (!(mu > 0) || !std::isfinite(mu)) {
    return absl::InvalidArgumentError("mu must be positive and finite");
  }
  if (!(delta_tv > 0 && delta_tv < 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_tv must lie in (0, 1/2), got ", delta_tv));
  }
  if (dimension < 1 || x0.size() != dimension) {
    return absl::InvalidArgumentError("x0 dimension mismatch");
  }
  if (!(d_init >= 0) || !std::isfinite(d_init)) {
    return absl::InvalidArgumentError("D_init must be finite and >= 0");
  }
  if (!(constants.c_t > 0 && constants.c_l > 0 &&
        constants.eta_concentration > 0 && constants.eta_series > 0)) {
    return absl::InvalidArgumentError("schedule constants must be positive");
  }

  SamplerSchedule schedule;
  schedule.delta_tv = delta_tv;
  schedule.x0 = std::move(x0);
  schedule.d_init = d_init;
  schedule.constants = constants;

  std::int64_t previous_steps = 1;
  for (int round = 1; round <= kMaxScheduleRounds; ++round) {
    const double delta_inner =
        delta_tv / (2 * static_cast<double>(previous_steps));
    const std::int64_t series = SeriesThreshold(constants.c_l, delta_inner);
    const double eta = StepSize(lipschitz, mu, delta_inner, series, constants);
    const double log_term = std::log(
        (dimension / mu + d_init * d_init) / (eta * delta_tv));
    const double steps =
        std::ceil(constants.c_t / (eta * mu) * std::max(log_term, 0.0));
    if (!(steps < 9e18)) {
      return absl::OutOfRangeError("outer step count overflows");
    }
    const std::int64_t outer_steps =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(steps));
    schedule.eta = eta;
    schedule.series_threshold = series;
    schedule.delta_inner = delta_inner;
    schedule.outer_steps = outer_steps;
    schedule.rounds = round;
    if (outer_steps == previous_steps) return schedule;
    previous_steps = outer_steps;
  }
  return absl::InternalError(absl::StrCat(
      "schedule fixed point did not converge in ", kMaxScheduleRounds,
      " rounds (last T=", previous_steps, ")"));
}

absl::StatusOr<std::int64_t> BaseGaussianDraw(const Regularizer& regularizer,
                                              const ConvexBody& body,
                                              const Vector& y, double eta,
                                              Rng& rng, Vector& out,
                                              std::int64_t max_attempts) {
  if (!(eta > 0)) return absl::InvalidArgumentError("eta must be positive");
  if (!(regularizer.mu >= 0)) {
    return absl::InvalidArgumentError("regulariser mu must be >= 0");
  }
  if (y.size() != body.dimension()) {
    return absl::InvalidArgumentError("centre dimension mismatch");
  }
  // Completing the square: mu|x|^2/2 + |x-y|^2/(2 eta) has minimiser
  // y / (1 + eta mu) and curvature (1 + eta mu) / eta.
  const double shrink = 1 / (1 + eta * regularizer.mu);
  const double sd = std::sqrt(eta * shrink);
  const Vector mean = shrink * y;
  out.resize(y.size());
  if (const ConvexBody::Box* box = body.box()) {
    // An isotropic Gaussian on a box factorises over coordinates.
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      const double z = rng.TruncatedNormal((box->lower[j] - mean[j]) / sd,
                                           (box->upper[j] - mean[j]) / sd);
      out[j] = std::clamp(mean[j] + sd * z, box->lower[j], box->upper[j]);
    }
    return 1;
  }
  const ConvexBody::Ball* ball = body.ball();
  if (ball == nullptr) {
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      out[j] = mean[j] + sd * rng.Normal();
    }
    return 1;
  }
  // Propose from the Gaussian conditioned on the slab |<x - c, u>| <= R that
  // contains the ball, u pointing from the centre c towards the mean, and
  // reject outside the ball. The slab keeps the acceptance rate bounded when
  // the mean sits many standard deviations outside the ball.
  const Vector offset = mean - ball->center;
  const double along = offset.norm();
  Vector u = Vector::Zero(y.size());
  if (along > 0) {
    u = offset / along;
  } else {
    u[0] = 1;
  }
  const double radius = ball->radius;
  Vector g(y.size());
  for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const double t =
        along + sd * rng.TruncatedNormal((-radius - along) / sd,
                                         (radius - along) / sd);
    for (Eigen::Index j = 0; j < y.size(); ++j) g[j] = sd * rng.Normal();
    g -= g.dot(u) * u;
    out = ball->center + t * u + g;
    if (body.ContainsPoint(out)) return attempt;
  }
  return absl::ResourceExhaustedError(absl::StrCat(
      "base Gaussian draw rejected ", max_attempts,
      " consecutive proposals on ", body.DebugString(),
      "; estimated acceptance < ", 1.0 / static_cast<double>(max_attempts)));
}

absl::StatusOr<Vector> BaseGaussianDraw(const Regularizer& regularizer,
                                        const ConvexBody& body, const Vector& y,
                                        double eta, Rng& rng) {
  Vector out(y.size());
  absl::StatusOr<std::int64_t> attempts =
      BaseGaussianDraw(regularizer, body, y, eta, rng, out);
  if (!attempts.ok()) return attempts.status();
  return out;
}

EstimatorDraw UnbiasedExpEstimator(const ComponentOracle& oracle,
                                   const Vector& x, const Vector& z,
                                   Rng& rng) {
  EstimatorDraw draw;
  double rho = 1;
  std::int64_t factors = 0;
  for (std::int64_t stage = 1;; ++stage) {
    double product = 1;
    for (std::int64_t i = 0; i < stage; ++i) {
      product *= oracle.SampleDifference(x, z, rng);
    }
    factors += stage;
    rho += product;
    draw.terms_used = stage;
    const double a = static_cast<double>(stage);
    if (rng.Uniform() < a / (a + 1)) break;
  }
  draw.rho = rho;
  draw.rho_bar = std::clamp(rho, 0.0, 2.0);
  draw.queries_used = 2 * factors;
  return draw;
}

absl::StatusOr<StepStatistics> RestrictedStep(const SamplerObjective& objective,
                                              const Vector& y,
                                              const SamplerSchedule& schedule,
                                              Rng& rng, Vector& out) {
  StepStatistics stats;
  Vector z(y.size());
  if (absl::Status status =
          RestrictedStepInto(objective, y, schedule, rng, out, z, stats);
      !status.ok()) {
    return status;
  }
  return stats;
}

void SamplerReport::Merge(const SamplerReport& other) {
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
  outer_steps += other.outer_steps;
  total_value_queries += other.total_value_queries;
  if (inner_attempts_histogram.size() < other.inner_attempts_histogram.size()) {
    inner_attempts_histogram.resize(other.inner_attempts_histogram.size(), 0);
  }
  for (std::size_t i = 0; i < other.inner_attempts_histogram.size(); ++i) {
    inner_attempts_histogram[i] += other.inner_attempts_histogram[i];
  }
  base_draws += other.base_draws;
  estimator_calls += other.estimator_calls;
  out_of_range += other.out_of_range;
}

double SamplerReport::QueriesPerStep() const {
  if (outer_steps == 0) return 0;
  return static_cast<double>(total_value_queries) /
         static_cast<double>(outer_steps);
}

double SamplerReport::MeanInnerAttempts() const {
  std::int64_t steps = 0;
  double weighted = 0;
  for (std::size_t a = 0; a < inner_attempts_histogram.size(); ++a) {
    steps += inner_attempts_histogram[a];
    weighted += static_cast<double>(a) *
                static_cast<double>(inner_attempts_histogram[a]);
  }
  return steps == 0 ? 0 : weighted / static_cast<double>(steps);
}

absl::StatusOr<SamplerRun> AlternatingSample(const SamplerObjective& objective,
                                             const SamplerSchedule& schedule,
                                             Rng& rng) {
  const int d = objective.body.dimension();
  if (schedule.x0.size() != d) {
    return absl::InvalidArgumentError("x0 dimension does not match the body");
  }
  if (!objective.body.ContainsPoint(schedule.x0)) {
    return absl::InvalidArgumentError("x0 lies outside the body");
  }
  if (!(schedule.eta > 0) || schedule.outer_steps < 1) {
    return absl::InvalidArgumentError("schedule is not initialised");
  }

  SamplerRun run;
  SamplerReport& report = run.report;
  report.inner_attempts_histogram.assign(kAttemptHistogramSize, 0);
  Vector x = schedule.x0;
  Vector y(d);
  Vector z(d);
  const double step_sd = std::sqrt(schedule.eta);
  for (std::int64_t t = 0; t < schedule.outer_steps; ++t) {
    for (int j = 0; j < d; ++j) y[j] = x[j] + step_sd * rng.Normal();
    StepStatistics stats;
    if (absl::Status status =
            RestrictedStepInto(objective, y, schedule, rng, x, z, stats);
        !status.ok()) {
      return status;
    }
    report.total_value_queries += stats.value_queries;
    report.base_draws += stats.base_draws;
    report.estimator_calls += stats.estimator_calls;
    report.out_of_range += stats.out_of_range;
    ++report.inner_attempts_histogram[std::min<std::int64_t>(
        stats.attempts, kAttemptHistogramSize - 1)];
  }
  report.outer_steps = schedule.outer_steps;
  if (!objective.body.ContainsPoint(x)) {
    return absl::InternalError("sampler produced a point outside the body");
  }
  report.samples.push_back(x);
  run.sample = std::move(x);
  return run;
}

absl::StatusOr<SamplerReport> DrawSamples(const SamplerObjective& objective,
                                          const SamplerSchedule& schedule,
                                          std::uint64_t seed, int count,
                                          int threads) {
  if (count < 1) return absl::InvalidArgumentError("count must be >= 1");
  std::vector<SamplerReport> chains(count);
  absl::Status status = ParallelFor(count, threads, [&](int i) -> absl::Status {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    absl::StatusOr<SamplerRun> run = AlternatingSample(objective, schedule, rng);
    if (!run.ok()) return run.status();
    chains[i] = std::move(run->report);
    return absl::OkStatus();
  });
  if (!status.ok()) return status;
  SamplerReport merged;
  merged.samples.reserve(count);
  for (const SamplerReport& chain : chains) merged.Merge(chain);
  return merged;
}

}  // namespace expmech
