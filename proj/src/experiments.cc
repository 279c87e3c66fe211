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

#include "expmech/experiments.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "absl/strings/str_cat.h"
#include "expmech/geometry.h"
#include "expmech/io.h"
#include "expmech/mechanism.h"
#include "expmech/parallel.h"
#include "expmech/sampler.h"
#include "expmech/verify.h"

namespace expmech {
namespace {

constexpr double kDefaultMaxQueriesPerStep = 32;
constexpr double kMaxOutOfRangeRate = 0.01;
constexpr double kMaxMeanInnerAttempts = 6;

const std::set<std::string>& CommonKeys() {
  static const auto* keys = new std::set<std::string>{
      "experiment", "spec",     "budget",   "repetitions", "seed",
      "output_path", "threads", "schedule", "delta_tv"};
  return *keys;
}

std::set<std::string> ExtraKeys(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kErm:
      return {"body", "dataset", "bias"};
    case ExperimentKind::kSco:
      return {"k_budget"};
    case ExperimentKind::kTvCheck:
      return {"mu", "bins", "noise_floor", "tv_threshold", "loss_samples",
              "body"};
    case ExperimentKind::kQueryScaling:
      return {"n_grid", "d_grid", "mode", "bias", "expected_slope",
              "slope_tolerance", "ratio_min", "ratio_max",
              "max_queries_per_step"};
    case ExperimentKind::kHardInstanceGap:
      return {"k_budget"};
    case ExperimentKind::kPrivacyTable:
      return {"epsilons", "deltas"};
  }
  return {};
}

std::uint64_t SubSeed(std::uint64_t seed, std::uint64_t tag) {
  return seed ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
}

absl::StatusOr<double> OptionalNumber(const Json& params, const char* key,
                                      double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", key, "' must be a number"));
  }
  return params[key].get<double>();
}

absl::StatusOr<std::vector<double>> NumberList(const Json& params,
                                               const char* key,
                                               std::vector<double> fallback) {
  if (!params.contains(key)) {
    if (fallback.empty()) {
      return absl::InvalidArgumentError(absl::StrCat("missing '", key, "'"));
    }
    return fallback;
  }
  const Json& j = params[key];
  if (!j.is_array() || j.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", key, "' must be a non-empty array"));
  }
  std::vector<double> out;
  for (const Json& v : j) {
    if (!v.is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat("'", key, "' must hold numbers"));
    }
    out.push_back(v.get<double>());
  }
  return out;
}

absl::StatusOr<std::vector<int>> PositiveIntList(const Json& params,
                                                 const char* key) {
  if (!params.contains(key) || !params[key].is_array() ||
      params[key].empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", key, "' must be a non-empty array of integers"));
  }
  std::vector<int> out;
  for (const Json& v : params[key]) {
    if (!v.is_number_integer() || v.get<long long>() < 1 ||
        v.get<long long>() > std::numeric_limits<int>::max()) {
      return absl::InvalidArgumentError(
          absl::StrCat("'", key, "' must hold positive integers"));
    }
    out.push_back(v.get<int>());
  }
  return out;
}

absl::StatusOr<int> OptionalPositiveInt(const Json& params, const char* key,
                                        int fallback) {
  if (!params.contains(key)) return fallback;
  const Json& v = params[key];
  if (!v.is_number_integer() || v.get<long long>() < 1 ||
      v.get<long long>() > std::numeric_limits<int>::max()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", key, "' must be a positive integer"));
  }
  return v.get<int>();
}

struct Moments {
  double mean = 0;
  double se = 0;
};

Moments MeanAndError(const std::vector<double>& values) {
  Moments m;
  const double n = static_cast<double>(values.size());
  for (double v : values) m.mean += v;
  m.mean /= n;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.se = std::sqrt(ss / (n - 1) / n);
  }
  return m;
}

void Check(ExperimentResult& result, std::string name, bool pass,
           std::string detail) {
  result.assertions.push_back({std::move(name), pass, std::move(detail)});
}

struct CommonSettings {
  ScheduleConstants constants;
  double delta_tv = 0;
};

absl::StatusOr<CommonSettings> ReadCommon(const ExperimentConfig& config) {
  CommonSettings common;
  if (config.params.contains("schedule")) {
    absl::StatusOr<ScheduleConstants> c =
        ScheduleConstantsFromJson(config.params["schedule"]);
    if (!c.ok()) return c.status();
    common.constants = *c;
  }
  absl::StatusOr<double> delta_tv =
      OptionalNumber(config.params, "delta_tv", 0);
  if (!delta_tv.ok()) return delta_tv.status();
  if (*delta_tv < 0 || *delta_tv >= 0.5) {
    return absl::InvalidArgumentError("'delta_tv' must lie in [0, 1/2)");
  }
  common.delta_tv = *delta_tv;
  return common;
}

absl::StatusOr<ConvexBody> BodyParamOr(const ExperimentConfig& config,
                                       ConvexBody fallback) {
  if (!config.params.contains("body")) return fallback;
  absl::StatusOr<ConvexBody> body = BodyFromJson(config.params["body"]);
  if (!body.ok()) return body.status();
  if (body->dimension() != config.spec->d) {
    return absl::InvalidArgumentError("body dimension differs from spec.d");
  }
  return body;
}

absl::Status CheckDiameter(const ConvexBody& body, double diameter) {
  absl::StatusOr<double> actual = Diameter(body);
  if (!actual.ok()) return actual.status();
  if (*actual > diameter * (1 + 1e-12)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "body diameter ", *actual, " exceeds spec.D = ", diameter));
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------

absl::StatusOr<ExperimentResult> RunPrivacyTable(
    const ExperimentConfig& config) {
  absl::StatusOr<std::vector<double>> epsilons =
      NumberList(config.params, "epsilons", {0.1, 0.5, 1, 2});
  if (!epsilons.ok()) return epsilons.status();
  absl::StatusOr<std::vector<double>> deltas =
      NumberList(config.params, "deltas", {1e-3, 1e-6, 1e-9});
  if (!deltas.ok()) return deltas.status();

  ExperimentResult result;
  CsvTable table({"epsilon", "delta", "s", "delta_at_s", "s_tight",
                  "delta_at_s_tight"});
  int violations = 0;
  for (double epsilon : *epsilons) {
    for (double delta : *deltas) {
      const PrivacyBudget budget{epsilon, delta};
      absl::StatusOr<GaussianShift> s = CalibrateShift(budget);
      if (!s.ok()) return s.status();
      absl::StatusOr<GaussianShift> tight = CalibrateShift(budget, true);
      if (!tight.ok()) return tight.status();
      const double at_s = GaussianDelta(*s, epsilon);
      const double at_tight = GaussianDelta(*tight, epsilon);
      if (!(at_s <= delta) || !(at_tight <= delta) || tight->s < s->s) {
        ++violations;
      }
      table.AddRow({FormatDouble(epsilon), FormatDouble(delta),
                    FormatDouble(s->s), FormatDouble(at_s),
                    FormatDouble(tight->s), FormatDouble(at_tight)});
    }
  }
  Check(result, "calibrated_shift_within_budget", violations == 0,
        absl::StrCat(violations, " of ", table.num_rows(), " rows violate"));
  result.artifacts.push_back({"privacy_table.csv", table.ToString()});
  return result;
}

// ---------------------------------------------------------------------------

absl::StatusOr<ExperimentResult> RunErm(const ExperimentConfig& config,
                                        const CommonSettings& common) {
  const ProblemSpec& spec = *config.spec;
  absl::StatusOr<ConvexBody> default_body =
      ConvexBody::CenteredBall(spec.d, spec.diameter / 2);
  if (!default_body.ok()) return default_body.status();
  absl::StatusOr<ConvexBody> body = BodyParamOr(config, *default_body);
  if (!body.ok()) return body.status();
  if (absl::Status status = CheckDiameter(*body, spec.diameter); !status.ok()) {
    return status;
  }

  Dataset data;
  if (config.params.contains("dataset")) {
    absl::StatusOr<Dataset> parsed = DatasetFromJson(config.params["dataset"]);
    if (!parsed.ok()) return parsed.status();
    data = *std::move(parsed);
    if (data.size() != spec.n || data.dimension() != spec.d) {
      return absl::InvalidArgumentError("dataset shape differs from spec");
    }
  } else {
    absl::StatusOr<double> bias = OptionalNumber(config.params, "bias", 0.5);
    if (!bias.ok()) return bias.status();
    data = SyntheticLinearDataset(spec.n, spec.d, spec.lipschitz, *bias,
                                  SubSeed(config.seed, 0));
  }

  const LossFamily family = LossFamily::Linear();
  absl::StatusOr<Calibration> cal = CalibrateErm(spec, *config.budget);
  if (!cal.ok()) return cal.status();
  RunOptions options;
  options.delta_tv = common.delta_tv;
  options.constants = common.constants;
  options.seed = config.seed;
  options.threads = config.threads;
  absl::StatusOr<MechanismBatch> batch = SampleMechanism(
      cal->config, family, data, *body, options, config.repetitions);
  if (!batch.ok()) return batch.status();
  absl::StatusOr<double> minimum = EmpiricalMinimum(family, data, *body);
  if (!minimum.ok()) return minimum.status();

  std::vector<std::string> header = {"run", "excess_risk"};
  for (int j = 0; j < spec.d; ++j) header.push_back(absl::StrCat("x", j));
  CsvTable runs(header);
  std::vector<double> excess;
  for (std::size_t r = 0; r < batch->outputs.size(); ++r) {
    const Vector& x = batch->outputs[r];
    absl::StatusOr<double> value = ErmObjective(family, data, x);
    if (!value.ok()) return value.status();
    excess.push_back(*value - *minimum);
    std::vector<std::string> row = {absl::StrCat(r), FormatDouble(excess.back())};
    for (int j = 0; j < spec.d; ++j) row.push_back(FormatDouble(x[j]));
    runs.AddRow(std::move(row));
  }
  const Moments m = MeanAndError(excess);
  const RunReport& report = batch->report;
  const UtilityCertificate& cert = cal->certificate;
  const double qps = report.sampler.QueriesPerStep();

  CsvTable summary({"epsilon", "delta", "certified_delta", "effective_delta",
                    "n", "d", "k", "mu", "eta", "T", "queries",
                    "queries_per_step", "excess_risk_estimate",
                    "excess_risk_se", "erm_bound", "closed_form_bound"});
  summary.AddRow({FormatDouble(report.epsilon), FormatDouble(report.delta),
                  FormatDouble(report.certified_delta),
                  FormatDouble(report.effective_delta), absl::StrCat(spec.n),
                  absl::StrCat(spec.d), FormatDouble(report.k),
                  FormatDouble(report.mu), FormatDouble(report.schedule.eta),
                  absl::StrCat(report.schedule.outer_steps),
                  absl::StrCat(report.value_queries), FormatDouble(qps),
                  FormatDouble(m.mean), FormatDouble(m.se),
                  FormatDouble(cert.erm_bound),
                  FormatDouble(cert.closed_form_bound)});

  ExperimentResult result;
  Check(result, "privacy_certified", report.certified_delta <= report.delta,
        absl::StrCat("delta(s, eps) = ", report.certified_delta));
  Check(result, "excess_risk_within_bound",
        m.mean <= cert.erm_bound + 3 * m.se,
        absl::StrCat("mean ", m.mean, " vs d/k + mu D^2/2 = ", cert.erm_bound,
                     " + 3 * ", m.se));
  Check(result, "queries_per_step", qps <= kDefaultMaxQueriesPerStep,
        absl::StrCat(qps, " <= ", kDefaultMaxQueriesPerStep));
  if (cert.headline_regime) {
    Check(result, "bound_below_closed_form",
          cert.erm_bound <= cert.closed_form_bound * (1 + 1e-9),
          absl::StrCat(cert.erm_bound, " <= ", cert.closed_form_bound));
  }

  Json json = RunReportToJson(report);
  json["erm_bound"] = cert.erm_bound;
  json["closed_form_bound"] = cert.closed_form_bound;
  json["excess_risk_se"] = m.se;
  result.artifacts.push_back({"erm_runs.csv", runs.ToString()});
  result.artifacts.push_back({"erm_summary.csv", summary.ToString()});
  result.artifacts.push_back({"erm_report.json", json.dump(2) + "\n"});
  return result;
}

// ---------------------------------------------------------------------------

absl::StatusOr<ExperimentResult> RunSco(const ExperimentConfig& config,
                                        const CommonSettings& common) {
  const ProblemSpec& spec = *config.spec;
  absl::StatusOr<int> k_budget =
      OptionalPositiveInt(config.params, "k_budget", spec.d);
  if (!k_budget.ok()) return k_budget.status();
  absl::StatusOr<ConvexBody> body =
      ConvexBody::CenteredBall(spec.d, spec.diameter / 2);
  if (!body.ok()) return body.status();

  struct Rep {
    double lipschitz = 0;
    double k = 0;
    double mu = 0;
    std::int64_t steps = 0;
    std::int64_t queries = 0;
    double gap = 0;
    double sco_bound = 0;
    double closed_form = 0;
    ScoBranch branch = ScoBranch::kNone;
  };
  std::vector<Rep> reps(config.repetitions);
  const LossFamily family = LossFamily::Linear();
  absl::Status status =
      ParallelFor(config.repetitions, config.threads, [&](int r) -> absl::Status {
        absl::StatusOr<HardInstance> instance =
            SampleHardInstance(spec, *k_budget, SubSeed(config.seed, 2 * r));
        if (!instance.ok()) return instance.status();
        // Gaussian samples are unbounded, so the mechanism is calibrated for
        // the Lipschitz constant the realised dataset actually attains.
        ProblemSpec realised = spec;
        realised.lipschitz =
            std::max(spec.lipschitz, DatasetLipschitz(family, instance->data, *body));
        absl::StatusOr<Calibration> cal =
            CalibrateSco(realised, *config.budget);
        if (!cal.ok()) return cal.status();
        RunOptions options;
        options.delta_tv = common.delta_tv;
        options.constants = common.constants;
        options.seed = SubSeed(config.seed, 2 * r + 1);
        absl::StatusOr<MechanismOutput> out =
            RunMechanism(cal->config, family, instance->data, *body, options);
        if (!out.ok()) return out.status();
        absl::StatusOr<double> gap =
            OptimalityGap(family, instance->population, out->x, *body);
        if (!gap.ok()) return gap.status();
        reps[r] = {realised.lipschitz,
                   cal->config.k,
                   cal->config.mu,
                   out->report.schedule.outer_steps,
                   out->report.value_queries,
                   *gap,
                   cal->certificate.sco_bound,
                   cal->certificate.closed_form_bound,
                   cal->config.sco_branch};
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  CsvTable runs({"rep", "G", "k", "mu", "T", "queries", "population_gap",
                 "sco_bound", "closed_form_bound", "branch"});
  std::vector<double> gaps;
  double bound_total = 0;
  double closed_total = 0;
  std::int64_t steps = 0;
  std::int64_t queries = 0;
  bool closed_form_holds = true;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Rep& rep = reps[r];
    gaps.push_back(rep.gap);
    bound_total += rep.sco_bound;
    closed_total += rep.closed_form;
    steps += rep.steps;
    queries += rep.queries;
    closed_form_holds &= rep.sco_bound <= rep.closed_form * (1 + 1e-9);
    runs.AddRow({absl::StrCat(r), FormatDouble(rep.lipschitz),
                 FormatDouble(rep.k), FormatDouble(rep.mu),
                 absl::StrCat(rep.steps), absl::StrCat(rep.queries),
                 FormatDouble(rep.gap), FormatDouble(rep.sco_bound),
                 FormatDouble(rep.closed_form),
                 rep.branch == ScoBranch::kSampleSize ? "sample_size"
                                                      : "privacy"});
  }
  const Moments m = MeanAndError(gaps);
  const double mean_bound = bound_total / reps.size();
  const double qps = static_cast<double>(queries) / static_cast<double>(steps);

  CsvTable summary({"n", "d", "epsilon", "delta", "k_budget", "repetitions",
                    "mean_population_gap", "gap_se", "mean_sco_bound",
                    "mean_closed_form_bound", "queries_per_step"});
  summary.AddRow({absl::StrCat(spec.n), absl::StrCat(spec.d),
                  FormatDouble(config.budget->epsilon),
                  FormatDouble(config.budget->delta), absl::StrCat(*k_budget),
                  absl::StrCat(config.repetitions), FormatDouble(m.mean),
                  FormatDouble(m.se), FormatDouble(mean_bound),
                  FormatDouble(closed_total / reps.size()), FormatDouble(qps)});

  ExperimentResult result;
  Check(result, "population_gap_within_bound", m.mean <= mean_bound + 3 * m.se,
        absl::StrCat("mean ", m.mean, " vs G^2/(mu n) + d/k + mu D^2/2 = ",
                     mean_bound, " + 3 * ", m.se));
  Check(result, "bound_below_closed_form", closed_form_holds,
        "sco_bound <= closed form on every repetition");
  Check(result, "queries_per_step", qps <= kDefaultMaxQueriesPerStep,
        absl::StrCat(qps, " <= ", kDefaultMaxQueriesPerStep));
  result.artifacts.push_back({"sco_runs.csv", runs.ToString()});
  result.artifacts.push_back({"sco_summary.csv", summary.ToString()});
  return result;
}

// ---------------------------------------------------------------------------

absl::StatusOr<ExperimentResult> RunTvCheck(const ExperimentConfig& config,
                                            CommonSettings common) {
  const ProblemSpec& spec = *config.spec;
  if (spec.d > 2) {
    return absl::InvalidArgumentError("tv_check supports d <= 2");
  }
  if (common.delta_tv == 0) common.delta_tv = 0.01;
  absl::StatusOr<double> mu = OptionalNumber(config.params, "mu", 1);
  if (!mu.ok()) return mu.status();
  if (!(*mu > 0)) return absl::InvalidArgumentError("'mu' must be positive");
  absl::StatusOr<int> bins =
      OptionalPositiveInt(config.params, "bins", spec.d == 1 ? 200 : 20);
  if (!bins.ok()) return bins.status();
  absl::StatusOr<double> noise_floor =
      OptionalNumber(config.params, "noise_floor", 0.02);
  if (!noise_floor.ok()) return noise_floor.status();
  absl::StatusOr<double> threshold =
      OptionalNumber(config.params, "tv_threshold", common.delta_tv);
  if (!threshold.ok()) return threshold.status();
  absl::StatusOr<ConvexBody> default_body =
      ConvexBody::Cube(spec.d, -spec.diameter / (2 * std::sqrt(spec.d)),
                       spec.diameter / (2 * std::sqrt(spec.d)));
  if (!default_body.ok()) return default_body.status();
  absl::StatusOr<ConvexBody> body = BodyParamOr(config, *default_body);
  if (!body.ok()) return body.status();
  if (!body->bounded()) {
    return absl::InvalidArgumentError("tv_check needs a bounded body");
  }

  Dataset data;
  if (config.params.contains("loss_samples")) {
    absl::StatusOr<Dataset> parsed = DatasetFromJson(
        Json{{"samples", config.params["loss_samples"]}});
    if (!parsed.ok()) return parsed.status();
    data = *std::move(parsed);
    if (data.dimension() != spec.d) {
      return absl::InvalidArgumentError("loss_samples dimension != spec.d");
    }
  } else {
    Vector s = Vector::Zero(spec.d);
    s[0] = spec.lipschitz;
    data.samples.push_back(s);
  }

  const LossFamily family = LossFamily::Linear();
  const double lipschitz = DatasetLipschitz(family, data, *body);
  EmpiricalOracle oracle(family, data, 1.0, lipschitz);
  const SamplerObjective objective{&oracle, Regularizer{*mu}, *body};
  absl::StatusOr<double> diameter = Diameter(*body);
  if (!diameter.ok()) return diameter.status();
  absl::StatusOr<SamplerSchedule> schedule =
      DeriveSchedule(lipschitz, *mu, common.delta_tv, body->Center(),
                     *diameter, spec.d, common.constants);
  if (!schedule.ok()) return schedule.status();
  if (absl::Status s = schedule->VerifyCaps(lipschitz, *mu); !s.ok()) return s;
  absl::StatusOr<SamplerReport> draws = DrawSamples(
      objective, *schedule, config.seed, config.repetitions, config.threads);
  if (!draws.ok()) return draws.status();

  const double reg = *mu;
  absl::StatusOr<GridDensity> grid = GridTarget(
      [&](const Vector& x) {
        return oracle.MeanValue(x) + 0.5 * reg * x.squaredNorm();
      },
      *body, spec.d == 1 ? 2000 : 2000);
  if (!grid.ok()) return grid.status();
  absl::StatusOr<TvResult> tv = TvEstimate(draws->samples, *grid, *bins);
  if (!tv.ok()) return tv.status();

  const double qps = draws->QueriesPerStep();
  const double oor_rate =
      draws->estimator_calls == 0
          ? 0
          : static_cast<double>(draws->out_of_range) /
                static_cast<double>(draws->estimator_calls);
  const double attempts = draws->MeanInnerAttempts();
  CsvTable summary({"d", "draws", "bins", "mu", "G", "eta", "T", "tv",
                    "tv_ci_low", "tv_ci_high", "threshold", "noise_floor",
                    "queries_per_step", "out_of_range_rate",
                    "mean_inner_attempts"});
  summary.AddRow({absl::StrCat(spec.d), absl::StrCat(config.repetitions),
                  absl::StrCat(*bins), FormatDouble(*mu),
                  FormatDouble(lipschitz), FormatDouble(schedule->eta),
                  absl::StrCat(schedule->outer_steps), FormatDouble(tv->estimate),
                  FormatDouble(tv->ci_low), FormatDouble(tv->ci_high),
                  FormatDouble(*threshold), FormatDouble(*noise_floor),
                  FormatDouble(qps), FormatDouble(oor_rate),
                  FormatDouble(attempts)});

  ExperimentResult result;
  Check(result, "tv_within_threshold", tv->estimate <= *threshold + *noise_floor,
        absl::StrCat("tv ", tv->estimate, " <= ", *threshold, " + ",
                     *noise_floor));
  Check(result, "queries_per_step", qps <= kDefaultMaxQueriesPerStep,
        absl::StrCat(qps, " <= ", kDefaultMaxQueriesPerStep));
  Check(result, "estimator_out_of_range_rate", oor_rate <= kMaxOutOfRangeRate,
        absl::StrCat(oor_rate, " <= ", kMaxOutOfRangeRate));
  Check(result, "mean_inner_attempts", attempts <= kMaxMeanInnerAttempts,
        absl::StrCat(attempts, " <= ", kMaxMeanInnerAttempts));
  result.artifacts.push_back({"tv_check_bins.csv", TvTableCsv(*tv)});
  result.artifacts.push_back({"tv_check_summary.csv", summary.ToString()});
  Json json;
  json["schedule"] = ScheduleToJson(*schedule);
  json["sampler"] = SamplerReportToJson(*draws);
  json["tv"] = {{"estimate", tv->estimate},
                {"ci_low", tv->ci_low},
                {"ci_high", tv->ci_high},
                {"outside", tv->outside}};
  result.artifacts.push_back({"tv_check_report.json", json.dump(2) + "\n"});
  return result;
}

// ---------------------------------------------------------------------------

absl::StatusOr<ExperimentResult> RunQueryScaling(
    const ExperimentConfig& config, const CommonSettings& common) {
  const Json& p = config.params;
  absl::StatusOr<std::vector<int>> n_grid = PositiveIntList(p, "n_grid");
  if (!n_grid.ok()) return n_grid.status();
  absl::StatusOr<std::vector<int>> d_grid = PositiveIntList(p, "d_grid");
  if (!d_grid.ok()) return d_grid.status();
  MechanismMode mode = MechanismMode::kErm;
  if (p.contains("mode")) {
    if (!p["mode"].is_string()) {
      return absl::InvalidArgumentError("'mode' must be a string");
    }
    absl::StatusOr<MechanismMode> parsed =
        ParseMechanismMode(p["mode"].get<std::string>());
    if (!parsed.ok()) return parsed.status();
    if (*parsed == MechanismMode::kStronglyConvexPassthrough) {
      return absl::InvalidArgumentError("query_scaling runs erm or sco");
    }
    mode = *parsed;
  }
  const bool sco = mode == MechanismMode::kSco;
  absl::StatusOr<double> bias = OptionalNumber(p, "bias", 0.5);
  if (!bias.ok()) return bias.status();
  absl::StatusOr<double> ratio_min = OptionalNumber(p, "ratio_min", 1.0 / 64);
  if (!ratio_min.ok()) return ratio_min.status();
  absl::StatusOr<double> ratio_max = OptionalNumber(p, "ratio_max", 64);
  if (!ratio_max.ok()) return ratio_max.status();
  absl::StatusOr<double> max_qps =
      OptionalNumber(p, "max_queries_per_step", kDefaultMaxQueriesPerStep);
  if (!max_qps.ok()) return max_qps.status();
  absl::StatusOr<double> slope_tol = OptionalNumber(p, "slope_tolerance", 0.35);
  if (!slope_tol.ok()) return slope_tol.status();
  std::optional<double> expected_slope;
  if (p.contains("expected_slope")) {
    absl::StatusOr<double> v = OptionalNumber(p, "expected_slope", 0);
    if (!v.ok()) return v.status();
    expected_slope = *v;
  }

  struct Point {
    int n = 0;
    int d = 0;
    Calibration cal;
    RunReport report;
  };
  std::vector<Point> points;
  for (int d : *d_grid) {
    for (int n : *n_grid) points.push_back({n, d, {}, {}});
  }
  const LossFamily family = LossFamily::Linear();
  absl::Status status = ParallelFor(
      static_cast<int>(points.size()), config.threads,
      [&](int i) -> absl::Status {
        Point& point = points[i];
        ProblemSpec spec = *config.spec;
        spec.n = point.n;
        spec.d = point.d;
        absl::StatusOr<ConvexBody> body =
            ConvexBody::CenteredBall(spec.d, spec.diameter / 2);
        if (!body.ok()) return body.status();
        const Dataset data = SyntheticLinearDataset(
            spec.n, spec.d, spec.lipschitz, *bias, SubSeed(config.seed, 2 * i));
        absl::StatusOr<Calibration> cal = sco
                                              ? CalibrateSco(spec, *config.budget)
                                              : CalibrateErm(spec, *config.budget);
        if (!cal.ok()) return cal.status();
        RunOptions options;
        options.delta_tv = common.delta_tv;
        options.constants = common.constants;
        options.seed = SubSeed(config.seed, 2 * i + 1);
        absl::StatusOr<MechanismBatch> batch = SampleMechanism(
            cal->config, family, data, *body, options, config.repetitions);
        if (!batch.ok()) return batch.status();
        point.cal = *std::move(cal);
        point.report = std::move(batch->report);
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  CsvTable table({"n", "d", "mode", "branch", "k", "mu", "sampler_lipschitz",
                  "sampler_mu", "eta", "T", "queries", "queries_per_step",
                  "formula", "ratio"});
  ExperimentResult result;
  double worst_ratio_low = std::numeric_limits<double>::infinity();
  double worst_ratio_high = 0;
  double worst_qps = 0;
  for (const Point& point : points) {
    const RunReport& r = point.report;
    const double queries =
        static_cast<double>(r.value_queries) / config.repetitions;
    const double formula = QueryFormula(point.n, point.d, *config.budget, sco);
    const double ratio = queries / formula;
    const double qps = r.sampler.QueriesPerStep();
    worst_ratio_low = std::min(worst_ratio_low, ratio);
    worst_ratio_high = std::max(worst_ratio_high, ratio);
    worst_qps = std::max(worst_qps, qps);
    const char* branch = !sco ? "erm"
                         : point.cal.config.sco_branch == ScoBranch::kSampleSize
                             ? "sample_size"
                             : "privacy";
    table.AddRow({absl::StrCat(point.n), absl::StrCat(point.d),
                  std::string(MechanismModeName(mode)), branch,
                  FormatDouble(r.k), FormatDouble(r.mu),
                  FormatDouble(r.sampler_lipschitz), FormatDouble(r.sampler_mu),
                  FormatDouble(r.schedule.eta),
                  absl::StrCat(r.schedule.outer_steps), FormatDouble(queries),
                  FormatDouble(qps), FormatDouble(formula),
                  FormatDouble(ratio)});
  }
  Check(result, "ratio_within_bounds",
        worst_ratio_low >= *ratio_min && worst_ratio_high <= *ratio_max,
        absl::StrCat("measured/formula in [", worst_ratio_low, ", ",
                     worst_ratio_high, "], allowed [", *ratio_min, ", ",
                     *ratio_max, "]"));
  Check(result, "queries_per_step", worst_qps <= *max_qps,
        absl::StrCat("max ", worst_qps, " <= ", *max_qps));

  CsvTable slopes({"d", "slope", "expected_slope"});
  for (int d : *d_grid) {
    std::vector<double> ns;
    std::vector<double> qs;
    for (const Point& point : points) {
      if (point.d != d) continue;
      ns.push_back(point.n);
      qs.push_back(static_cast<double>(point.report.value_queries));
    }
    std::set<double> distinct(ns.begin(), ns.end());
    if (distinct.size() < 2) continue;
    const double slope = LogLogSlope(ns, qs);
    slopes.AddRow({absl::StrCat(d), FormatDouble(slope),
                   expected_slope ? FormatDouble(*expected_slope) : ""});
    if (expected_slope) {
      Check(result, absl::StrCat("log_log_slope_d", d),
            std::abs(slope - *expected_slope) <= *slope_tol,
            absl::StrCat("slope ", slope, " vs ", *expected_slope, " +- ",
                         *slope_tol));
    }
  }
  result.artifacts.push_back({"query_scaling.csv", table.ToString()});
  result.artifacts.push_back({"query_scaling_slopes.csv", slopes.ToString()});
  return result;
}

// ---------------------------------------------------------------------------

absl::StatusOr<ExperimentResult> RunHardInstanceGap(
    const ExperimentConfig& config) {
  const ProblemSpec& spec = *config.spec;
  absl::StatusOr<int> k_budget =
      OptionalPositiveInt(config.params, "k_budget", spec.n);
  if (!k_budget.ok()) return k_budget.status();
  const double radius = spec.diameter / 2;
  absl::StatusOr<ConvexBody> body = ConvexBody::CenteredBall(spec.d, radius);
  if (!body.ok()) return body.status();
  const LossFamily family = LossFamily::Linear();

  CsvTable table({"rep", "delta_hi", "sigma_hi", "gap_minimizer", "gap_zero",
                  "expected_gap_zero", "gap_empirical_minimizer"});
  double worst_minimizer = 0;
  double worst_zero = 0;
  for (int r = 0; r < config.repetitions; ++r) {
    absl::StatusOr<HardInstance> instance =
        SampleHardInstance(spec, *k_budget, SubSeed(config.seed, r));
    if (!instance.ok()) return instance.status();
    const HardInstanceParams& hp = instance->params;
    const Vector x_star = -hp.v * (radius / std::sqrt(spec.d));
    absl::StatusOr<double> gap_star =
        OptimalityGap(family, instance->population, x_star, *body);
    if (!gap_star.ok()) return gap_star.status();
    absl::StatusOr<double> gap_zero = OptimalityGap(
        family, instance->population, Vector::Zero(spec.d), *body);
    if (!gap_zero.ok()) return gap_zero.status();
    const double expected_zero = hp.delta_hi * std::sqrt(spec.d) * radius;

    Vector mean = Vector::Zero(spec.d);
    for (const Vector& s : instance->data.samples) mean += s;
    const Vector x_erm = -radius * mean.normalized();
    absl::StatusOr<double> gap_erm =
        OptimalityGap(family, instance->population, x_erm, *body);
    if (!gap_erm.ok()) return gap_erm.status();

    worst_minimizer = std::max(worst_minimizer, std::abs(*gap_star) / expected_zero);
    worst_zero =
        std::max(worst_zero, std::abs(*gap_zero - expected_zero) / expected_zero);
    table.AddRow({absl::StrCat(r), FormatDouble(hp.delta_hi),
                  FormatDouble(hp.sigma_hi), FormatDouble(*gap_star),
                  FormatDouble(*gap_zero), FormatDouble(expected_zero),
                  FormatDouble(*gap_erm)});
  }
  // Both identities are exact in real arithmetic; the tolerance covers the
  // rounding of a d-term dot product against a square root.
  const double tolerance = 4 * spec.d * std::numeric_limits<double>::epsilon();
  ExperimentResult result;
  Check(result, "minimizer_gap_zero", worst_minimizer <= tolerance,
        absl::StrCat("max |gap(-v R/sqrt(d))| / (delta sqrt(d) R) = ",
                     worst_minimizer));
  Check(result, "origin_gap_closed_form", worst_zero <= tolerance,
        absl::StrCat("max relative error ", worst_zero));
  result.artifacts.push_back({"hard_instance_gap.csv", table.ToString()});
  return result;
}

}  // namespace

absl::string_view ExperimentName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kErm:
      return "erm";
    case ExperimentKind::kSco:
      return "sco";
    case ExperimentKind::kTvCheck:
      return "tv_check";
    case ExperimentKind::kQueryScaling:
      return "query_scaling";
    case ExperimentKind::kHardInstanceGap:
      return "hard_instance_gap";
    case ExperimentKind::kPrivacyTable:
      return "privacy_table";
  }
  return "unknown";
}

absl::StatusOr<ExperimentKind> ParseExperimentKind(absl::string_view name) {
  for (ExperimentKind kind :
       {ExperimentKind::kErm, ExperimentKind::kSco, ExperimentKind::kTvCheck,
        ExperimentKind::kQueryScaling, ExperimentKind::kHardInstanceGap,
        ExperimentKind::kPrivacyTable}) {
    if (name == ExperimentName(kind)) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown experiment '", name, "'"));
}

absl::Status ExperimentConfig::Validate() const {
  if (repetitions < 1) {
    return absl::InvalidArgumentError("repetitions must be >= 1");
  }
  if (threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  if (experiment != ExperimentKind::kPrivacyTable) {
    if (!spec) return absl::InvalidArgumentError("missing 'spec'");
    if (absl::Status s = spec->Validate(); !s.ok()) return s;
  }
  const bool needs_budget = experiment == ExperimentKind::kErm ||
                            experiment == ExperimentKind::kSco ||
                            experiment == ExperimentKind::kQueryScaling;
  if (needs_budget) {
    if (!budget) return absl::InvalidArgumentError("missing 'budget'");
    if (absl::Status s = budget->Validate(); !s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ExperimentConfigFromJson(const Json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  if (!j.contains("experiment") || !j["experiment"].is_string()) {
    return absl::InvalidArgumentError("missing string field 'experiment'");
  }
  ExperimentConfig config;
  absl::StatusOr<ExperimentKind> kind =
      ParseExperimentKind(j["experiment"].get<std::string>());
  if (!kind.ok()) return kind.status();
  config.experiment = *kind;

  const std::set<std::string> extra = ExtraKeys(*kind);
  for (const auto& [key, value] : j.items()) {
    if (CommonKeys().count(key) == 0 && extra.count(key) == 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown field '", key, "' for experiment ", ExperimentName(*kind)));
    }
    if (extra.count(key) > 0 || key == "schedule" || key == "delta_tv") {
      config.params[key] = value;
    }
  }

  if (j.contains("spec")) {
    const Json& s = j["spec"];
    if (!s.is_object()) return absl::InvalidArgumentError("'spec' must be an object");
    for (const auto& [key, value] : s.items()) {
      if (key != "n" && key != "d" && key != "G" && key != "D") {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown spec field '", key, "'"));
      }
    }
    ProblemSpec spec;
    for (const char* key : {"n", "d"}) {
      if (!s.contains(key) || !s[key].is_number_integer()) {
        return absl::InvalidArgumentError(
            absl::StrCat("spec.", key, " must be an integer"));
      }
    }
    for (const char* key : {"G", "D"}) {
      if (!s.contains(key) || !s[key].is_number()) {
        return absl::InvalidArgumentError(
            absl::StrCat("spec.", key, " must be a number"));
      }
    }
    spec.n = s["n"].get<int>();
    spec.d = s["d"].get<int>();
    spec.lipschitz = s["G"].get<double>();
    spec.diameter = s["D"].get<double>();
    config.spec = spec;
  }
  if (j.contains("budget")) {
    const Json& b = j["budget"];
    if (!b.is_object() || !b.contains("epsilon") || !b.contains("delta") ||
        !b["epsilon"].is_number() || !b["delta"].is_number() || b.size() != 2) {
      return absl::InvalidArgumentError(
          "'budget' must be {\"epsilon\": number, \"delta\": number}");
    }
    config.budget = PrivacyBudget{b["epsilon"].get<double>(),
                                  b["delta"].get<double>()};
  }
  if (j.contains("repetitions")) {
    if (!j["repetitions"].is_number_integer()) {
      return absl::InvalidArgumentError("'repetitions' must be an integer");
    }
    const long long reps = j["repetitions"].get<long long>();
    if (reps < 1 || reps > std::numeric_limits<int>::max()) {
      return absl::InvalidArgumentError("repetitions must be >= 1");
    }
    config.repetitions = static_cast<int>(reps);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      return absl::InvalidArgumentError("'seed' must be a non-negative integer");
    }
    config.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string()) {
      return absl::InvalidArgumentError("'output_path' must be a string");
    }
    config.output_path = j["output_path"].get<std::string>();
  }
  if (j.contains("threads")) {
    if (!j["threads"].is_number_integer() || j["threads"].get<long long>() < 1) {
      return absl::InvalidArgumentError("'threads' must be a positive integer");
    }
    config.threads = j["threads"].get<int>();
  }
  if (absl::Status status = config.Validate(); !status.ok()) return status;
  return config;
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view text) {
  Json j = Json::parse(text.begin(), text.end(), nullptr,
                       /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError("config is not valid JSON");
  }
  return ExperimentConfigFromJson(j);
}

bool ExperimentResult::AllPassed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const AssertionResult& a) { return a.pass; });
}

std::string ExperimentResult::Report() const {
  std::string out;
  for (const AssertionResult& a : assertions) {
    absl::StrAppend(&out, a.pass ? "PASS " : "FAIL ", a.name, ": ", a.detail,
                    "\n");
  }
  return out;
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config) {
  if (absl::Status status = config.Validate(); !status.ok()) return status;
  absl::StatusOr<CommonSettings> common = ReadCommon(config);
  if (!common.ok()) return common.status();
  switch (config.experiment) {
    case ExperimentKind::kPrivacyTable:
      return RunPrivacyTable(config);
    case ExperimentKind::kErm:
      return RunErm(config, *common);
    case ExperimentKind::kSco:
      return RunSco(config, *common);
    case ExperimentKind::kTvCheck:
      return RunTvCheck(config, *common);
    case ExperimentKind::kQueryScaling:
      return RunQueryScaling(config, *common);
    case ExperimentKind::kHardInstanceGap:
      return RunHardInstanceGap(config);
  }
  return absl::InternalError("unhandled experiment");
}

absl::Status WriteArtifacts(const ExperimentResult& result,
                            const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", directory, ": ", ec.message()));
  }
  for (const auto& [name, contents] : result.artifacts) {
    const std::string path = (std::filesystem::path(directory) / name).string();
    if (absl::Status status = WriteFile(path, contents); !status.ok()) {
      return status;
    }
  }
  return absl::OkStatus();
}

Dataset SyntheticLinearDataset(int n, int d, double lipschitz, double bias,
                               std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.samples.reserve(n);
  const double shift = bias / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < n; ++i) {
    Vector g(d);
    do {
      for (int j = 0; j < d; ++j) g[j] = shift + rng.Normal();
    } while (g.norm() == 0);
    data.samples.push_back(g * (lipschitz / g.norm()));
  }
  data.provenance.kind = DatasetProvenance::Kind::kIid;
  data.provenance.distribution =
      absl::StrCat("G * normalize(N(", FormatDouble(shift), " * 1, I))");
  data.provenance.seed = seed;
  return data;
}

double QueryFormula(int n, int d, const PrivacyBudget& budget, bool sco) {
  const double nn = n;
  const double dd = d;
  double leading = budget.epsilon * budget.epsilon * nn * nn /
                   std::log(1 / budget.delta);
  if (sco) leading = std::min(leading, nn * dd);
  const double log_term = std::log(nn * dd * budget.epsilon / budget.delta);
  return leading * log_term * log_term;
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace expmech
