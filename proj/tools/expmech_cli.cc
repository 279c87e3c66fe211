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

// expmech --config run.json [--seed N] [--threads N] [--out DIR]
//
// Exit status: 0 when every assertion passes, 1 on a failed assertion or a
// runtime error, 2 when the config cannot be read or violates the schema.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "expmech/experiments.h"
#include "expmech/io.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitSchema = 2;

std::optional<int> ThreadsFromEnv() {
  const char* env = std::getenv("EXPMECH_THREADS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 4096) return std::nullopt;
  return static_cast<int>(value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run a JSON-configured private-sampling experiment."};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  app.add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--threads", threads, "worker threads (EXPMECH_THREADS)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out, "override output_path");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  absl::StatusOr<std::string> text = expmech::ReadFile(config_path);
  if (!text.ok()) {
    std::cerr << "error: " << text.status().message() << "\n";
    return kExitSchema;
  }
  absl::StatusOr<expmech::ExperimentConfig> config =
      expmech::ParseExperimentConfig(*text);
  if (!config.ok()) {
    std::cerr << "config error: " << config.status().message() << "\n";
    return kExitSchema;
  }
  if (seed) config->seed = *seed;
  if (threads) {
    config->threads = *threads;
  } else if (std::optional<int> env = ThreadsFromEnv()) {
    config->threads = *env;
  }
  if (out) config->output_path = *out;

  absl::StatusOr<expmech::ExperimentResult> result =
      expmech::RunExperiment(*config);
  if (!result.ok()) {
    std::cerr << "error: " << result.status() << "\n";
    return absl::IsInvalidArgument(result.status()) ? kExitSchema
                                                    : kExitFailure;
  }
  std::cout << result->Report();
  if (absl::Status status =
          expmech::WriteArtifacts(*result, config->output_path);
      !status.ok()) {
    std::cerr << "error: " << status << "\n";
    return kExitFailure;
  }
  return result->AllPassed() ? 0 : kExitFailure;
}
