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

#include "expmech/mechanism.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace expmech {
namespace {

constexpr double kHeadlineLimit = 0.1;

double ShiftFor(double lipschitz, double k, int n, double curvature) {
  return lipschitz * std::sqrt(k) /
         (static_cast<double>(n) * std::sqrt(curvature));
}

absl::Status ValidateCalibrationInputs(const ProblemSpec& spec,
                                       const PrivacyBudget& budget) {
  if (absl::Status status = spec.Validate(); !status.ok()) return status;
  if (absl::Status status = budget.Validate(); !status.ok()) return status;
  if (!(budget.epsilon > 0)) {
    return absl::InvalidArgumentError("calibration needs epsilon > 0");
  }
  if (!(budget.delta < 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("calibration needs delta < 1/2, got ", budget.delta));
  }
  return absl::OkStatus();
}

// sqrt(L + eps) - sqrt(L), written without cancellation.
double RootGap(double log_term, double epsilon) {
  return epsilon / (std::sqrt(log_term + epsilon) + std::sqrt(log_term));
}

double LogThreeQuarters(double delta) { return std::log(3 / (4 * delta)); }

bool InHeadlineRegime(const PrivacyBudget& budget) {
  return budget.epsilon < kHeadlineLimit && budget.delta < kHeadlineLimit;
}

Vector DataMean(const Dataset& data) {
  Vector mean = Vector::Zero(data.dimension());
  for (const Vector& s : data.samples) mean += s;
  return mean / static_cast<double>(data.size());
}

// max_{i,j} |s_i - s_j|.
double SampleSpread(const Dataset& data) {
  double spread = 0;
  for (int i = 0; i < data.size(); ++i) {
    for (int j = i + 1; j < data.size(); ++j) {
      spread = std::max(spread, (data.samples[i] - data.samples[j]).norm());
    }
  }
  return spread;
}

Vector Project(const ConvexBody& body, const Vector& x) {
  if (const ConvexBody::Ball* b = body.ball()) {
    const Vector offset = x - b->center;
    const double norm = offset.norm();
    if (norm <= b->radius) return x;
    return b->center + offset * (b->radius / norm);
  }
  if (const ConvexBody::Box* b = body.box()) {
    return x.cwiseMax(b->lower).cwiseMin(b->upper);
  }
  return x;
}

}  // namespace

absl::string_view MechanismModeName(MechanismMode mode) {
  switch (mode) {
    case MechanismMode::kErm:
      return "erm";
    case MechanismMode::kSco:
      return "sco";
    case MechanismMode::kStronglyConvexPassthrough:
      return "strongly_convex_passthrough";
  }
  return "unknown";
}

absl::StatusOr<MechanismMode> ParseMechanismMode(absl::string_view name) {
  if (name == "erm") return MechanismMode::kErm;
  if (name == "sco") return MechanismMode::kSco;
  if (name == "strongly_convex_passthrough") {
    return MechanismMode::kStronglyConvexPassthrough;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown mode '", name, "'"));
}

absl::Status MechanismConfig::Verify() const {
  const double curvature = mu + loss_curvature;
  if (!(k > 0) || !std::isfinite(k)) {
    return absl::InvalidArgumentError("k must be positive and finite");
  }
  if (!(mu >= 0) || !(loss_curvature >= 0) || !(curvature > 0) ||
      !std::isfinite(curvature)) {
    return absl::InvalidArgumentError(
        "mu + loss curvature must be positive and finite");
  }
  if (!(lipschitz > 0) || !std::isfinite(lipschitz) || n < 1) {
    return absl::InvalidArgumentError("G must be positive and n >= 1");
  }
  if (absl::Status status = budget.Validate(); !status.ok()) return status;
  const double s = ShiftFor(lipschitz, k, n, curvature);
  if (std::abs(s - shift_check.s) > 1e-12 * s) {
    return absl::FailedPreconditionError(absl::StrCat(
        "stored shift ", shift_check.s, " != G sqrt(k)/(n sqrt(mu)) = ", s));
  }
  const double delta = GaussianDelta({s}, budget.epsilon);
  if (!(delta <= budget.delta)) {
    return absl::FailedPreconditionError(
        absl::StrCat("shift ", s, " gives delta(", budget.epsilon, ") = ",
                     delta, " > ", budget.delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<MechanismConfig> MakeMechanismConfig(
    double k, double mu, const PrivacyBudget& budget, MechanismMode mode,
    double lipschitz, int n, double loss_curvature) {
  MechanismConfig config;
  config.k = k;
  config.mu = mu;
  config.budget = budget;
  config.mode = mode;
  config.lipschitz = lipschitz;
  config.n = n;
  config.loss_curvature = loss_curvature;
  config.shift_check.s = ShiftFor(lipschitz, k, n, mu + loss_curvature);
  config.certified_delta = GaussianDelta(config.shift_check, budget.epsilon);
  if (absl::Status status = config.Verify(); !status.ok()) return status;
  return config;
}

absl::StatusOr<Calibration> CalibrateErm(const ProblemSpec& spec,
                                         const PrivacyBudget& budget) {
  if (absl::Status status = ValidateCalibrationInputs(spec, budget);
      !status.ok()) {
    return status;
  }
  const double n = spec.n;
  const double d = spec.d;
  const double g = spec.lipschitz;
  const double diam = spec.diameter;
  const double c = RootGap(LogThreeQuarters(budget.delta), budget.epsilon);
  const double mu = g * std::sqrt(d) / (n * diam * c);
  const double k = 2 * mu * n * n * c * c / (g * g);

  absl::StatusOr<MechanismConfig> config =
      MakeMechanismConfig(k, mu, budget, MechanismMode::kErm, g, spec.n);
  if (!config.ok()) {
    return absl::InternalError(absl::StrCat(
        "ERM calibration failed re-verification: ", config.status().message()));
  }

  Calibration out{*std::move(config), {}};
  UtilityCertificate& cert = out.certificate;
  cert.erm_bound = d / k + mu * diam * diam / 2;
  cert.sco_bound = g * g / (mu * n) + cert.erm_bound;
  cert.headline_regime = InHeadlineRegime(budget);
  cert.closed_form_bound =
      cert.headline_regime
          ? 2 * g * diam * std::sqrt(d * std::log(1 / budget.delta)) /
                (budget.epsilon * n)
          : g * diam * std::sqrt(d) / (n * c);
  return out;
}

absl::StatusOr<Calibration> CalibrateSco(const ProblemSpec& spec,
                                         const PrivacyBudget& budget) {
  if (absl::Status status = ValidateCalibrationInputs(spec, budget);
      !status.ok()) {
    return status;
  }
  const double n = spec.n;
  const double d = spec.d;
  const double g = spec.lipschitz;
  const double diam = spec.diameter;
  const double log_term = LogThreeQuarters(budget.delta);
  const bool headline = InHeadlineRegime(budget);
  const double c = RootGap(log_term, budget.epsilon);
  const double privacy_term =
      headline ? budget.epsilon * budget.epsilon * n * n / (2 * log_term)
               : 2 * c * c * n * n;
  const double sample_term = 2 * n * d;
  const double mu =
      (g / diam) * std::sqrt(2 * (d / privacy_term + 1 / (2 * n)));
  const double k = (mu / (g * g)) * std::min(privacy_term, sample_term);

  absl::StatusOr<MechanismConfig> config =
      MakeMechanismConfig(k, mu, budget, MechanismMode::kSco, g, spec.n);
  if (!config.ok()) {
    return absl::InternalError(absl::StrCat(
        "SCO calibration failed re-verification: ", config.status().message()));
  }
  config->sco_branch = sample_term < privacy_term ? ScoBranch::kSampleSize
                                                  : ScoBranch::kPrivacy;

  Calibration out{*std::move(config), {}};
  UtilityCertificate& cert = out.certificate;
  cert.erm_bound = d / k + mu * diam * diam / 2;
  cert.sco_bound = g * g / (mu * n) + cert.erm_bound;
  cert.headline_regime = headline;
  const double first =
      headline ? 2 * std::sqrt(std::log(1 / budget.delta) * d) /
                     (budget.epsilon * n)
               : std::sqrt(2 * d / privacy_term);
  cert.closed_form_bound = g * diam * (first + 2 / std::sqrt(n));
  return out;
}

absl::StatusOr<double> EmpiricalMinimum(const LossFamily& family,
                                        const Dataset& data,
                                        const ConvexBody& body) {
  if (absl::Status status = data.Validate(body.dimension()); !status.ok()) {
    return status;
  }
  switch (family.kind()) {
    case LossKind::kLinear:
      return MinimizeLinear(body, DataMean(data));
    case LossKind::kQuadraticTest: {
      // Mean of lambda/2 |x - s_i|^2 is lambda/2 (|x - m|^2 + spread).
      const Vector mean = DataMean(data);
      double spread = 0;
      for (const Vector& s : data.samples) spread += (s - mean).squaredNorm();
      spread /= data.size();
      return 0.5 * family.strength() *
             ((Project(body, mean) - mean).squaredNorm() + spread);
    }
    case LossKind::kAbsLinear:
      break;
  }
  return absl::UnimplementedError(absl::StrCat(
      "no closed-form minimum for ", LossKindName(family.kind()), " losses"));
}

absl::StatusOr<MechanismBatch> SampleMechanism(const MechanismConfig& config,
                                               const LossFamily& family,
                                               const Dataset& data,
                                               const ConvexBody& body,
                                               const RunOptions& options,
                                               int count) {
  const auto start = std::chrono::steady_clock::now();
  if (absl::Status status = config.Verify(); !status.ok()) return status;
  const int d = body.dimension();
  if (absl::Status status = data.Validate(d); !status.ok()) return status;
  if (data.size() != config.n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dataset has ", data.size(), " samples, config was calibrated for ",
        config.n));
  }

  const bool passthrough =
      config.mode == MechanismMode::kStronglyConvexPassthrough;
  if (passthrough) {
    if (family.kind() != LossKind::kQuadraticTest) {
      return absl::InvalidArgumentError(
          "strongly_convex_passthrough needs quadratic_test losses");
    }
    if (std::abs(config.loss_curvature - family.strength()) >
        1e-12 * family.strength()) {
      return absl::FailedPreconditionError(
          "config loss curvature differs from the family strength");
    }
  } else if (config.loss_curvature != 0) {
    return absl::FailedPreconditionError(
        "loss curvature is only meaningful in passthrough mode");
  }

  // Privacy was certified for G; the data must honour it on K. Quadratic
  // losses differ by lambda <x, s' - s> + const, so in passthrough mode only
  // the pairwise differences need to be Lipschitz, also on unbounded bodies.
  const double data_lipschitz = passthrough
                                    ? family.strength() * SampleSpread(data)
                                    : DatasetLipschitz(family, data, body);
  if (!std::isfinite(data_lipschitz)) {
    return absl::InvalidArgumentError(
        "losses are not Lipschitz on the body; bound the body");
  }
  if (data_lipschitz > config.lipschitz * (1 + 1e-12)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "dataset Lipschitz constant ", data_lipschitz,
        " exceeds the calibrated G = ", config.lipschitz));
  }

  // Passthrough: k lambda |x|^2 / 2 moves into the regulariser and the
  // components keep the residual k lambda (|s|^2/2 - <x, s>), Lipschitz
  // k lambda |s|.
  double residual_lipschitz = data_lipschitz;
  double removed = 0;
  if (passthrough) {
    residual_lipschitz = 0;
    for (const Vector& s : data.samples) {
      residual_lipschitz = std::max(residual_lipschitz, s.norm());
    }
    residual_lipschitz *= family.strength();
    removed = config.k * family.strength();
  }

  RunReport report;
  report.epsilon = config.budget.epsilon;
  report.delta = config.budget.delta;
  report.certified_delta = config.certified_delta;
  report.delta_tv = options.delta_tv > 0
                        ? options.delta_tv
                        : std::min(config.budget.delta / 3, kDefaultMaxDeltaTv);
  report.effective_delta = report.certified_delta + report.delta_tv;
  report.k = config.k;
  report.mu = config.mu;
  report.sampler_lipschitz = config.k * residual_lipschitz;
  report.sampler_mu = config.k * config.mu + removed;
  report.seed = options.seed;

  Vector x0 = options.x0 ? *options.x0 : body.Center();
  if (x0.size() != d) return absl::InvalidArgumentError("x0 dimension");
  double d_init = 0;
  if (options.d_init) {
    d_init = *options.d_init;
  } else if (body.bounded()) {
    absl::StatusOr<double> diameter = Diameter(body);
    if (!diameter.ok()) return diameter.status();
    d_init = *diameter;
  } else if (passthrough) {
    const double lambda = family.strength();
    const Vector mode = DataMean(data) * (lambda / (lambda + config.mu));
    d_init = (x0 - mode).norm();
  } else {
    return absl::InvalidArgumentError(
        "unbounded body: supply d_init, a bound on |x0 - argmin|");
  }

  absl::StatusOr<SamplerSchedule> schedule =
      DeriveSchedule(report.sampler_lipschitz, report.sampler_mu,
                     report.delta_tv, std::move(x0), d_init, d,
                     options.constants);
  if (!schedule.ok()) return schedule.status();
  if (absl::Status status =
          schedule->VerifyCaps(report.sampler_lipschitz, report.sampler_mu);
      !status.ok()) {
    return status;
  }
  report.schedule = *schedule;

  EmpiricalOracle oracle(family, data, config.k, report.sampler_lipschitz,
                         removed);
  const SamplerObjective objective{&oracle, Regularizer{report.sampler_mu},
                                   body};
  absl::StatusOr<SamplerReport> draws =
      DrawSamples(objective, *schedule, options.seed, count, options.threads);
  if (!draws.ok()) {
    return absl::Status(draws.status().code(),
                        absl::StrCat("sampler aborted (eta=", schedule->eta,
                                     ", T=", schedule->outer_steps, "): ",
                                     draws.status().message()));
  }
  report.value_queries = draws->total_value_queries;

  absl::StatusOr<double> minimum = EmpiricalMinimum(family, data, body);
  if (minimum.ok()) {
    double total = 0;
    for (const Vector& x : draws->samples) {
      absl::StatusOr<double> value = ErmObjective(family, data, x);
      if (!value.ok()) return value.status();
      total += *value - *minimum;
    }
    report.excess_risk_estimate = total / draws->samples.size();
  } else {
    report.excess_risk_estimate = std::numeric_limits<double>::quiet_NaN();
  }

  MechanismBatch batch;
  batch.outputs = draws->samples;
  report.sampler = *std::move(draws);
  report.wall_time_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  batch.report = std::move(report);
  return batch;
}

absl::StatusOr<MechanismOutput> RunMechanism(const MechanismConfig& config,
                                             const LossFamily& family,
                                             const Dataset& data,
                                             const ConvexBody& body,
                                             const RunOptions& options) {
  absl::StatusOr<MechanismBatch> batch =
      SampleMechanism(config, family, data, body, options, 1);
  if (!batch.ok()) return batch.status();
  MechanismOutput out;
  out.x = batch->outputs.front();
  out.report = std::move(batch->report);
  return out;
}

}  // namespace expmech
