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

// Regularised exponential mechanism: release a draw from
//
//   p(x) ~ exp(-k (F(x; D) + mu |x|^2 / 2))   on K,
//
// with (k, mu) calibrated so that neighbouring datasets yield output laws no
// more distinguishable than N(0, 1) and N(s, 1), s = G sqrt(k) / (n sqrt(mu)).

#ifndef EXPMECH_MECHANISM_H_
#define EXPMECH_MECHANISM_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "expmech/geometry.h"
#include "expmech/losses.h"
#include "expmech/privacy.h"
#include "expmech/sampler.h"

namespace expmech {

enum class MechanismMode { kErm, kSco, kStronglyConvexPassthrough };

absl::string_view MechanismModeName(MechanismMode mode);
absl::StatusOr<MechanismMode> ParseMechanismMode(absl::string_view name);

// Which term of min{eps^2 n^2 / (2 log(3/(4 delta))), 2nd} sized k.
enum class ScoBranch { kNone, kPrivacy, kSampleSize };

struct MechanismConfig {
  double k = 0;
  double mu = 0;
  PrivacyBudget budget;
  MechanismMode mode = MechanismMode::kErm;
  // Shift certified at construction.
  GaussianShift shift_check;
  // Per-sample Lipschitz constant and dataset size the shift was computed for.
  double lipschitz = 0;
  int n = 0;
  // Strong convexity contributed by the losses themselves (passthrough only).
  double loss_curvature = 0;
  ScoBranch sco_branch = ScoBranch::kNone;
  // GaussianDelta(shift_check, epsilon); never above budget.delta.
  double certified_delta = 0;

  // Recomputes s and the curve and checks both against the stored values.
  absl::Status Verify() const;
};

// Builds a config for arbitrary (k, mu) and certifies it; fails when the
// induced shift violates the budget. The shift uses total strong convexity
// mu + loss_curvature.
absl::StatusOr<MechanismConfig> MakeMechanismConfig(
    double k, double mu, const PrivacyBudget& budget, MechanismMode mode,
    double lipschitz, int n, double loss_curvature = 0);

struct UtilityCertificate {
  // d/k + mu D^2 / 2.
  double erm_bound = 0;
  // G^2 / (mu n) + d/k + mu D^2 / 2.
  double sco_bound = 0;
  // Headline closed form; inside the small-(eps, delta) regime this uses
  // log(1/delta), outside it the exact log(3/(4 delta)) expression.
  double closed_form_bound = 0;
  bool headline_regime = false;
};

struct Calibration {
  MechanismConfig config;
  UtilityCertificate certificate;
};

// k = 2 mu n^2 c^2 / G^2 and mu = G sqrt(d) / (n D c) with
// c = sqrt(log(3/(4 delta)) + eps) - sqrt(log(3/(4 delta))).
absl::StatusOr<Calibration> CalibrateErm(const ProblemSpec& spec,
                                         const PrivacyBudget& budget);

// k = (mu / G^2) min{m_1, 2nd}, mu = (G/D) sqrt(2 (d/m_1 + 1/(2n))), where
// m_1 = eps^2 n^2 / (2 log(3/(4 delta))) for eps, delta < 1/10 and
// m_1 = 2 c^2 n^2 otherwise.
absl::StatusOr<Calibration> CalibrateSco(const ProblemSpec& spec,
                                         const PrivacyBudget& budget);

inline constexpr double kDefaultMaxDeltaTv = 1e-4;

struct RunOptions {
  // <= 0 selects min(delta / 3, kDefaultMaxDeltaTv).
  double delta_tv = 0;
  ScheduleConstants constants = ScheduleConstants::Pinned();
  // Defaults: centre of K and its diameter. All-space bodies need d_init
  // unless the target's mode is known in closed form (passthrough).
  std::optional<Vector> x0;
  std::optional<double> d_init;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RunReport {
  double epsilon = 0;
  double delta = 0;
  double certified_delta = 0;
  double delta_tv = 0;
  // certified_delta + delta_tv: what the sampled output actually guarantees.
  double effective_delta = 0;
  double k = 0;
  double mu = 0;
  // Constants handed to the sampler for k (F + mu |x|^2 / 2).
  double sampler_lipschitz = 0;
  double sampler_mu = 0;
  SamplerSchedule schedule;
  std::int64_t value_queries = 0;
  // Mean over draws of F(x) - min_K F; NaN when no closed-form min exists.
  double excess_risk_estimate = 0;
  double wall_time_ms = 0;
  std::uint64_t seed = 0;
  SamplerReport sampler;
};

struct MechanismBatch {
  std::vector<Vector> outputs;
  RunReport report;
};

// `count` independent mechanism releases; release i uses sampler chain i of
// options.seed.
absl::StatusOr<MechanismBatch> SampleMechanism(const MechanismConfig& config,
                                               const LossFamily& family,
                                               const Dataset& data,
                                               const ConvexBody& body,
                                               const RunOptions& options,
                                               int count);

struct MechanismOutput {
  Vector x;
  RunReport report;
};

absl::StatusOr<MechanismOutput> RunMechanism(const MechanismConfig& config,
                                             const LossFamily& family,
                                             const Dataset& data,
                                             const ConvexBody& body,
                                             const RunOptions& options);

// min_K of the empirical objective when it has a closed form (linear losses
// on a ball or box).
absl::StatusOr<double> EmpiricalMinimum(const LossFamily& family,
                                        const Dataset& data,
                                        const ConvexBody& body);

}  // namespace expmech

#endif  // EXPMECH_MECHANISM_H_
