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

// JSON-configured experiments behind the `expmech` command-line tool. Each
// run produces CSV and JSON artifacts plus a list of named assertions; the
// CSVs depend only on the config and seed, never on timing or thread count.

#ifndef EXPMECH_EXPERIMENTS_H_
#define EXPMECH_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "expmech/losses.h"
#include "expmech/privacy.h"
#include "expmech/random.h"
#include "expmech/serialize.h"

namespace expmech {

enum class ExperimentKind {
  kErm,
  kSco,
  kTvCheck,
  kQueryScaling,
  kHardInstanceGap,
  kPrivacyTable,
};

absl::string_view ExperimentName(ExperimentKind kind);
absl::StatusOr<ExperimentKind> ParseExperimentKind(absl::string_view name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kPrivacyTable;
  // Required by every experiment except privacy_table.
  std::optional<ProblemSpec> spec;
  std::optional<PrivacyBudget> budget;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::string output_path = ".";
  int threads = 1;
  // Experiment-specific keys, already checked against the allowed set.
  Json params = Json::object();

  absl::Status Validate() const;
};

// Schema violations come back as InvalidArgument.
absl::StatusOr<ExperimentConfig> ExperimentConfigFromJson(const Json& j);
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view text);

struct AssertionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<AssertionResult> assertions;
  // (file name, contents) in emission order.
  std::vector<std::pair<std::string, std::string>> artifacts;

  bool AllPassed() const;
  // One "PASS name: detail" / "FAIL name: detail" line per assertion.
  std::string Report() const;
};

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config);

// Creates `directory` if needed and writes every artifact into it.
absl::Status WriteArtifacts(const ExperimentResult& result,
                            const std::string& directory);

// Unit-norm-times-G samples s_i = G g_i / |g_i| with g_i ~ N(bias e / sqrt(d),
// I), e the all-ones vector; nonzero mean so the ERM minimiser is on the
// boundary of a centred ball.
Dataset SyntheticLinearDataset(int n, int d, double lipschitz, double bias,
                               std::uint64_t seed);

// (eps^2 n^2 / log(1/delta)) log^2(n d eps / delta), with the first factor
// replaced by min{., n d} for SCO.
double QueryFormula(int n, int d, const PrivacyBudget& budget, bool sco);

// Least-squares slope of log(y) against log(x).
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace expmech

#endif  // EXPMECH_EXPERIMENTS_H_
