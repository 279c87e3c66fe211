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

#ifndef EXPMECH_LOSSES_H_
#define EXPMECH_LOSSES_H_

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "expmech/geometry.h"

namespace expmech {

// Shape of a private optimisation instance: n users in dimension d, losses
// (or their pairwise differences) G-Lipschitz, domain of diameter D.
struct ProblemSpec {
  int n = 0;
  int d = 0;
  double lipschitz = 0;
  double diameter = 0;

  absl::Status Validate() const;
};

enum class LossKind {
  // f(x; s) = <x, s>.
  kLinear,
  // f(x; s) = |<x, s> - b| for a fixed offset b.
  kAbsLinear,
  // f(x; s) = (lambda / 2) |x - s|^2, lambda-strongly convex.
  kQuadraticTest,
};

absl::string_view LossKindName(LossKind kind);
absl::StatusOr<LossKind> ParseLossKind(absl::string_view name);

// A closed family of value oracles {f(.; s)} with a query counter. Every
// Evaluate() call counts as one value query; the counter is atomic so chains
// may share a family.
class LossFamily {
 public:
  static LossFamily Linear();
  static LossFamily AbsLinear(double offset);
  static absl::StatusOr<LossFamily> QuadraticTest(double strength);

  LossFamily(const LossFamily& other);
  LossFamily& operator=(const LossFamily& other);

  LossKind kind() const { return kind_; }
  double offset() const { return offset_; }
  // Strong convexity of each member; zero for the non-quadratic kinds.
  double strength() const { return strength_; }

  double Evaluate(const Vector& x, const Vector& s) const {
    queries_.fetch_add(1, std::memory_order_relaxed);
    return EvaluateUncounted(x, s);
  }

  // Lipschitz constant of f(.; s) restricted to `body`. Infinite for the
  // quadratic family on an unbounded body.
  double SampleLipschitz(const Vector& s, const ConvexBody& body) const;

  std::uint64_t query_count() const {
    return queries_.load(std::memory_order_relaxed);
  }
  void ResetQueryCount() { queries_.store(0, std::memory_order_relaxed); }

 private:
  LossFamily(LossKind kind, double offset, double strength)
      : kind_(kind), offset_(offset), strength_(strength) {}

  double EvaluateUncounted(const Vector& x, const Vector& s) const;

  LossKind kind_;
  double offset_ = 0;
  double strength_ = 0;
  mutable std::atomic<std::uint64_t> queries_{0};
};

inline std::uint64_t QueryCount(const LossFamily& family) {
  return family.query_count();
}

struct DatasetProvenance {
  enum class Kind { kExplicit, kIid };
  Kind kind = Kind::kExplicit;
  // Free-form description of the sampling law for kIid.
  std::string distribution;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<Vector> samples;
  DatasetProvenance provenance;

  int size() const { return static_cast<int>(samples.size()); }
  int dimension() const {
    return samples.empty() ? 0 : static_cast<int>(samples.front().size());
  }
  // Nonempty, every sample of dimension `d`, all finite.
  absl::Status Validate(int d) const;
};

// One sample per row, comma separated, 17 significant digits.
std::string DatasetToCsv(const Dataset& data);
absl::StatusOr<Dataset> DatasetFromCsv(absl::string_view csv);

// max_i SampleLipschitz(s_i).
double DatasetLipschitz(const LossFamily& family, const Dataset& data,
                        const ConvexBody& body);

// F(x; D) = (1/n) sum_i f(x; s_i). Issues exactly n value queries.
absl::StatusOr<double> ErmObjective(const LossFamily& family,
                                    const Dataset& data, const Vector& x);

// Isotropic Gaussian population N(mean, sigma^2 I).
struct GaussianPopulation {
  Vector mean;
  double sigma = 0;
};

// Parameters of the sign-recovery instance N(delta_hi v, sigma_hi^2 I) with
// d (sigma_hi^2 + delta_hi^2) = G^2 and delta_hi = sigma_hi sqrt(d) /
// (2 sqrt(k_budget)).
struct HardInstanceParams {
  Vector v;
  double delta_hi = 0;
  double sigma_hi = 0;
  int k_budget = 0;

  Vector PopulationMean() const { return delta_hi * v; }
};

// Closed-form (sigma_hi, delta_hi) for a given sign vector.
absl::StatusOr<HardInstanceParams> MakeHardInstanceParams(Vector v,
                                                          double lipschitz,
                                                          int k_budget);

struct HardInstance {
  HardInstanceParams params;
  GaussianPopulation population;
  Dataset data;
};

// Draws v uniformly from {-1, +1}^d and n i.i.d. samples from the
// corresponding Gaussian.
absl::StatusOr<HardInstance> SampleHardInstance(const ProblemSpec& spec,
                                                int k_budget,
                                                std::uint64_t seed);

// min_{x in body} <x, m> in closed form (balls and boxes only).
absl::StatusOr<double> MinimizeLinear(const ConvexBody& body, const Vector& m);

// Exact population optimality gap E_s[f(x_hat; s)] - inf_K E_s[f(x; s)] for
// linear losses over a ball or a box.
absl::StatusOr<double> OptimalityGap(const LossFamily& family,
                                     const GaussianPopulation& population,
                                     const Vector& x_hat,
                                     const ConvexBody& body);

}  // namespace expmech

#endif  // EXPMECH_LOSSES_H_
