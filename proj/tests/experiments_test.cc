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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "expmech/serialize.h"
#include "gtest/gtest.h"

namespace expmech {
namespace {

ExperimentConfig Parse(const std::string& text) {
  absl::StatusOr<ExperimentConfig> config = ParseExperimentConfig(text);
  EXPECT_TRUE(config.ok()) << config.status();
  return config.ok() ? *config : ExperimentConfig{};
}

absl::StatusCode ParseCode(const std::string& text) {
  return ParseExperimentConfig(text).status().code();
}

// Every .csv artifact, concatenated with its name.
std::string Csvs(const ExperimentResult& result) {
  std::string out;
  for (const auto& [name, contents] : result.artifacts) {
    if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") {
      out += name + "\n" + contents;
    }
  }
  return out;
}

const std::string kSmallErm = R"({
  "experiment": "erm",
  "spec": {"n": 10, "d": 1, "G": 1, "D": 2},
  "budget": {"epsilon": 1, "delta": 1e-3},
  "schedule": "desk", "delta_tv": 0.05,
  "repetitions": 6, "seed": 3
})";

TEST(ExperimentNameTest, RoundTrip) {
  for (ExperimentKind kind :
       {ExperimentKind::kErm, ExperimentKind::kSco, ExperimentKind::kTvCheck,
        ExperimentKind::kQueryScaling, ExperimentKind::kHardInstanceGap,
        ExperimentKind::kPrivacyTable}) {
    EXPECT_EQ(*ParseExperimentKind(ExperimentName(kind)), kind);
  }
  EXPECT_FALSE(ParseExperimentKind("gibbs").ok());
}

TEST(ConfigSchemaTest, ParsesCommonFields) {
  const ExperimentConfig c = Parse(kSmallErm);
  EXPECT_EQ(c.experiment, ExperimentKind::kErm);
  ASSERT_TRUE(c.spec.has_value());
  EXPECT_EQ(c.spec->n, 10);
  EXPECT_DOUBLE_EQ(c.spec->diameter, 2);
  ASSERT_TRUE(c.budget.has_value());
  EXPECT_DOUBLE_EQ(c.budget->delta, 1e-3);
  EXPECT_EQ(c.repetitions, 6);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_TRUE(c.Validate().ok());
}

TEST(ConfigSchemaTest, RejectsSchemaViolations) {
  const auto bad = absl::StatusCode::kInvalidArgument;
  EXPECT_EQ(ParseCode("{\"experiment\": \"erm\""), bad);
  EXPECT_EQ(ParseCode("[1, 2]"), bad);
  EXPECT_EQ(ParseCode("{}"), bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "nope"})"), bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "privacy_table", "temperature": 1})"), bad);
  // k_budget belongs to sco only.
  EXPECT_EQ(ParseCode(R"({"experiment": "erm", "k_budget": 3,
      "spec": {"n": 10, "d": 1, "G": 1, "D": 2},
      "budget": {"epsilon": 1, "delta": 1e-3}})"),
            bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "erm",
      "budget": {"epsilon": 1, "delta": 1e-3}})"),
            bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "erm",
      "spec": {"n": 10, "d": 1, "G": 1, "D": 2}})"),
            bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "erm",
      "spec": {"n": "ten", "d": 1, "G": 1, "D": 2},
      "budget": {"epsilon": 1, "delta": 1e-3}})"),
            bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "erm",
      "spec": {"n": 10, "d": 1, "G": 1, "D": 2, "L": 3},
      "budget": {"epsilon": 1, "delta": 1e-3}})"),
            bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "erm",
      "spec": {"n": 10, "d": 1, "G": 1, "D": 2},
      "budget": {"epsilon": 1, "delta": 1.5}})"),
            bad);
  // A valid budget that calibration cannot use fails at run time.
  const ExperimentConfig high_delta = Parse(R"({"experiment": "erm",
      "spec": {"n": 10, "d": 1, "G": 1, "D": 2},
      "budget": {"epsilon": 1, "delta": 0.7}})");
  EXPECT_EQ(RunExperiment(high_delta).status().code(), bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "privacy_table", "repetitions": 0})"),
            bad);
  EXPECT_EQ(ParseCode(R"({"experiment": "privacy_table", "seed": -1})"), bad);
}

TEST(SerializeTest, BodyRoundTrip) {
  Vector c(2);
  c << 0.5, -1.0 / 3;
  for (const ConvexBody& body :
       {*ConvexBody::L2Ball(c, 0.25), *ConvexBody::MakeBox(-c.cwiseAbs(), c.cwiseAbs()),
        *ConvexBody::AllOf(3)}) {
    absl::StatusOr<ConvexBody> back = BodyFromJson(BodyToJson(body));
    ASSERT_TRUE(back.ok()) << back.status();
    EXPECT_EQ(BodyToJson(*back).dump(), BodyToJson(body).dump());
  }
  EXPECT_FALSE(BodyFromJson(Json::parse(R"({"type": "simplex"})")).ok());
  EXPECT_FALSE(
      BodyFromJson(Json::parse(R"({"type": "l2_ball", "center": [0], "radius": -1})"))
          .ok());
}

TEST(SerializeTest, DatasetAndScheduleConstants) {
  Dataset data;
  Vector a(2), b(2);
  a << 1e-17, 2;
  b << -0.1, 1.0 / 7;
  data.samples = {a, b};
  absl::StatusOr<Dataset> back = DatasetFromJson(DatasetToJson(data));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->samples[0], a);
  EXPECT_EQ(back->samples[1], b);
  EXPECT_FALSE(DatasetFromJson(Json::parse(R"({"samples": [[1], [1, 2]]})")).ok());

  const ScheduleConstants desk = *ScheduleConstantsFromJson(Json("desk"));
  EXPECT_DOUBLE_EQ(desk.c_t, ScheduleConstants::Desk().c_t);
  const ScheduleConstants pinned = *ScheduleConstantsFromJson(Json("pinned"));
  EXPECT_DOUBLE_EQ(pinned.eta_series, std::ldexp(1.0, -8));
  const ScheduleConstants custom = *ScheduleConstantsFromJson(Json::parse(
      R"({"c_t": 2, "c_l": 3, "eta_concentration": 0.25, "eta_series": 0.125})"));
  EXPECT_DOUBLE_EQ(custom.c_l, 3);
  EXPECT_FALSE(ScheduleConstantsFromJson(Json("fast")).ok());
  EXPECT_FALSE(ScheduleConstantsFromJson(Json::parse(R"({"c_t": 2})")).ok());
}

TEST(RunExperimentTest, PrivacyTableRowsAndAssertions) {
  const ExperimentConfig c = Parse(R"({"experiment": "privacy_table",
      "epsilons": [0.5, 1], "deltas": [1e-6, 1e-3, 0.1]})");
  absl::StatusOr<ExperimentResult> r = RunExperiment(c);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_TRUE(r->AllPassed()) << r->Report();
  ASSERT_FALSE(r->artifacts.empty());
  const std::string& csv = r->artifacts.front().second;
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "epsilon,delta,s,delta_at_s,s_tight,delta_at_s_tight");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(RunExperimentTest, SmallErmIsReproducible) {
  ExperimentConfig c = Parse(kSmallErm);
  const ExperimentResult a = *RunExperiment(c);
  const ExperimentResult b = *RunExperiment(c);
  EXPECT_FALSE(Csvs(a).empty());
  EXPECT_EQ(Csvs(a), Csvs(b));
  c.threads = 3;
  EXPECT_EQ(Csvs(*RunExperiment(c)), Csvs(a));
  c.seed = 4;
  EXPECT_NE(Csvs(*RunExperiment(c)), Csvs(a));
  for (const AssertionResult& assertion : a.assertions) {
    EXPECT_NE(assertion.name, "");
  }
}

TEST(RunExperimentTest, SingleGridPointGivesOneRow) {
  const ExperimentConfig c = Parse(R"({"experiment": "query_scaling",
      "spec": {"n": 20, "d": 1, "G": 1, "D": 2},
      "budget": {"epsilon": 1, "delta": 1e-3},
      "n_grid": [20], "d_grid": [1], "schedule": "desk", "delta_tv": 0.05,
      "repetitions": 1, "seed": 2})");
  absl::StatusOr<ExperimentResult> r = RunExperiment(c);
  ASSERT_TRUE(r.ok()) << r.status();
  ASSERT_FALSE(r->artifacts.empty());
  EXPECT_EQ(r->artifacts.front().first, "query_scaling.csv");
  const std::string& csv = r->artifacts.front().second;
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(RunExperimentTest, HardInstanceGapIsExact) {
  const ExperimentConfig c = Parse(R"({"experiment": "hard_instance_gap",
      "spec": {"n": 50, "d": 3, "G": 1, "D": 2}, "repetitions": 4, "seed": 5})");
  absl::StatusOr<ExperimentResult> r = RunExperiment(c);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_TRUE(r->AllPassed()) << r->Report();
}

TEST(ReportTest, Format) {
  ExperimentResult r;
  r.assertions = {{"alpha", true, "1 <= 2"}, {"beta", false, "3 > 2"}};
  EXPECT_EQ(r.Report(), "PASS alpha: 1 <= 2\nFAIL beta: 3 > 2\n");
  EXPECT_FALSE(r.AllPassed());
  r.assertions.pop_back();
  EXPECT_TRUE(r.AllPassed());
}

TEST(WriteArtifactsTest, CreatesDirectoryAndFiles) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "expmech_artifacts_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  ExperimentResult r;
  r.artifacts = {{"a.csv", "x\n1\n"}, {"b.json", "{}"}};
  ASSERT_TRUE(WriteArtifacts(r, dir.string()).ok());
  std::ifstream in(dir / "a.csv");
  std::stringstream contents;
  contents << in.rdbuf();
  EXPECT_EQ(contents.str(), "x\n1\n");
  EXPECT_TRUE(std::filesystem::exists(dir / "b.json"));
  std::filesystem::remove_all(dir.parent_path());
}

TEST(SyntheticDatasetTest, NormsAndDeterminism) {
  const Dataset a = SyntheticLinearDataset(200, 3, 1.5, 0.5, 12);
  const Dataset b = SyntheticLinearDataset(200, 3, 1.5, 0.5, 12);
  ASSERT_EQ(a.size(), 200);
  Vector mean = Vector::Zero(3);
  for (int i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.samples[i].norm(), 1.5, 1e-12);
    EXPECT_EQ(a.samples[i], b.samples[i]);
    mean += a.samples[i];
  }
  // Positive bias along the all-ones direction.
  EXPECT_GT(mean.sum(), 0);
}

TEST(QueryFormulaTest, ClosedForm) {
  const PrivacyBudget b{0.5, 1e-4};
  const double lead = 0.25 * 100 * 100 / std::log(1e4);
  const double tail = std::pow(std::log(100 * 3 * 0.5 / 1e-4), 2);
  EXPECT_NEAR(QueryFormula(100, 3, b, false), lead * tail, 1e-9 * lead * tail);
  EXPECT_NEAR(QueryFormula(100, 3, b, true), std::min(lead, 300.0) * tail,
              1e-9 * tail);
}

TEST(LogLogSlopeTest, PowerLaws) {
  const std::vector<double> x = {1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(7 * v * v);
  EXPECT_NEAR(LogLogSlope(x, y), 2, 1e-12);
  y.clear();
  for (double v : x) y.push_back(3 / std::sqrt(v));
  EXPECT_NEAR(LogLogSlope(x, y), -0.5, 1e-12);
}

}  // namespace
}  // namespace expmech
