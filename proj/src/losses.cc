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

#include "expmech/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "expmech/io.h"
#include "expmech/random.h"

namespace expmech {

absl::Status ProblemSpec::Validate() const {
  if (n <= 0) return absl::InvalidArgumentError("n must be positive");
  if (d <= 0) return absl::InvalidArgumentError("d must be positive");
  if (!(lipschitz > 0) || !std::isfinite(lipschitz)) {
    return absl::InvalidArgumentError("G must be positive and finite");
  }
  if (!(diameter > 0) || !std::isfinite(diameter)) {
    return absl::InvalidArgumentError("D must be positive and finite");
  }
  return absl::OkStatus();
}

absl::string_view LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kLinear:
      return "linear";
    case LossKind::kAbsLinear:
      return "abs_linear";
    case LossKind::kQuadraticTest:
      return "quadratic_test";
  }
  return "unknown";
}

absl::StatusOr<LossKind> ParseLossKind(absl::string_view name) {
  if (name == "linear") return LossKind::kLinear;
  if (name == "abs_linear") return LossKind::kAbsLinear;
  if (name == "quadratic_test") return LossKind::kQuadraticTest;
  return absl::InvalidArgumentError(absl::StrCat("unknown loss '", name, "'"));
}

LossFamily LossFamily::Linear() { return LossFamily(LossKind::kLinear, 0, 0); }

LossFamily LossFamily::AbsLinear(double offset) {
  return LossFamily(LossKind::kAbsLinear, offset, 0);
}

absl::StatusOr<LossFamily> LossFamily::QuadraticTest(double strength) {
  if (!(strength > 0) || !std::isfinite(strength)) {
    return absl::InvalidArgumentError("quadratic strength must be positive");
  }
  return LossFamily(LossKind::kQuadraticTest, 0, strength);
}

LossFamily::LossFamily(const LossFamily& other)
    : kind_(other.kind_),
      offset_(other.offset_),
      strength_(other.strength_),
      queries_(other.query_count()) {}

LossFamily& LossFamily::operator=(const LossFamily& other) {
  kind_ = other.kind_;
  offset_ = other.offset_;
  strength_ = other.strength_;
  queries_.store(other.query_count(), std::memory_order_relaxed);
  return *this;
}

double LossFamily::EvaluateUncounted(const Vector& x, const Vector& s) const {
  switch (kind_) {
    case LossKind::kLinear:
      return x.dot(s);
    case LossKind::kAbsLinear:
      return std::abs(x.dot(s) - offset_);
    case LossKind::kQuadraticTest:
      return 0.5 * strength_ * (x - s).squaredNorm();
  }
  return 0;
}

double LossFamily::SampleLipschitz(const Vector& s,
                                   const ConvexBody& body) const {
  switch (kind_) {
    case LossKind::kLinear:
    case LossKind::kAbsLinear:
      return s.norm();
    case LossKind::kQuadraticTest: {
      // |grad| = lambda |x - s|, maximised at the point of K farthest from s.
      if (const ConvexBody::Ball* b = body.ball()) {
        return strength_ * ((b->center - s).norm() + b->radius);
      }
      if (const ConvexBody::Box* b = body.box()) {
        const Vector far = (b->lower - s).cwiseAbs().cwiseMax(
            (b->upper - s).cwiseAbs());
        return strength_ * far.norm();
      }
      return std::numeric_limits<double>::infinity();
    }
  }
  return 0;
}

absl::Status Dataset::Validate(int d) const {
  if (samples.empty()) return absl::InvalidArgumentError("dataset is empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != d) {
      return absl::InvalidArgumentError(absl::StrCat(
          "sample ", i, " has dimension ", samples[i].size(), ", expected ", d));
    }
    if (!samples[i].allFinite()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", i, " is not finite"));
    }
  }
  return absl::OkStatus();
}

std::string DatasetToCsv(const Dataset& data) {
  std::string out;
  for (const Vector& s : data.samples) {
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (j > 0) out.push_back(',');
      out += FormatDouble(s[j]);
    }
    out.push_back('\n');
  }
  return out;
}

absl::StatusOr<Dataset> DatasetFromCsv(absl::string_view csv) {
  Dataset data;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(csv, '\n', absl::SkipWhitespace())) {
    ++line_number;
    std::vector<double> values;
    for (absl::string_view cell : absl::StrSplit(line, ',')) {
      absl::StatusOr<double> value = ParseDouble(cell);
      if (!value.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_number, ": ", value.status().message()));
      }
      values.push_back(*value);
    }
    data.samples.push_back(
        Eigen::Map<const Vector>(values.data(), values.size()));
  }
  if (absl::Status status = data.Validate(data.dimension()); !status.ok()) {
    return status;
  }
  return data;
}

double DatasetLipschitz(const LossFamily& family, const Dataset& data,
                        const ConvexBody& body) {
  double g = 0;
  for (const Vector& s : data.samples) {
    g = std::max(g, family.SampleLipschitz(s, body));
  }
  return g;
}

absl::StatusOr<double> ErmObjective(const LossFamily& family,
                                    const Dataset& data, const Vector& x) {
  if (data.samples.empty()) {
    return absl::InvalidArgumentError("dataset is empty");
  }
  double total = 0;
  for (const Vector& s : data.samples) {
    if (s.size() != x.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "point has dimension ", x.size(), ", samples have ", s.size()));
    }
    total += family.Evaluate(x, s);
  }
  return total / static_cast<double>(data.samples.size());
}

absl::StatusOr<HardInstanceParams> MakeHardInstanceParams(Vector v,
                                                          double lipschitz,
                                                          int k_budget) {
  if (k_budget < 1) return absl::InvalidArgumentError("k_budget must be >= 1");
  if (v.size() == 0) return absl::InvalidArgumentError("empty sign vector");
  if (!(lipschitz > 0)) return absl::InvalidArgumentError("G must be positive");
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (v[j] != 1.0 && v[j] != -1.0) {
      return absl::InvalidArgumentError("sign vector entries must be +-1");
    }
  }
  const double d = static_cast<double>(v.size());
  const double k = static_cast<double>(k_budget);
  HardInstanceParams params;
  params.sigma_hi = lipschitz / std::sqrt(d + d * d / (4 * k));
  params.delta_hi = params.sigma_hi * std::sqrt(d) / (2 * std::sqrt(k));
  params.k_budget = k_budget;
  params.v = std::move(v);
  return params;
}

absl::StatusOr<HardInstance> SampleHardInstance(const ProblemSpec& spec,
                                                int k_budget,
                                                std::uint64_t seed) {
  if (absl::Status status = spec.Validate(); !status.ok()) return status;
  Rng rng(seed);
  Vector v(spec.d);
  for (int j = 0; j < spec.d; ++j) v[j] = rng.Uniform() < 0.5 ? -1.0 : 1.0;
  absl::StatusOr<HardInstanceParams> params =
      MakeHardInstanceParams(std::move(v), spec.lipschitz, k_budget);
  if (!params.ok()) return params.status();

  HardInstance instance;
  instance.params = *std::move(params);
  instance.population.mean = instance.params.PopulationMean();
  instance.population.sigma = instance.params.sigma_hi;
  instance.data.samples.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    Vector s(spec.d);
    for (int j = 0; j < spec.d; ++j) {
      s[j] = instance.population.mean[j] +
             instance.population.sigma * rng.Normal();
    }
    instance.data.samples.push_back(std::move(s));
  }
  instance.data.provenance.kind = DatasetProvenance::Kind::kIid;
  instance.data.provenance.distribution =
      absl::StrCat("hard_instance(delta=", FormatDouble(instance.params.delta_hi),
                   ",sigma=", FormatDouble(instance.params.sigma_hi), ")");
  instance.data.provenance.seed = seed;
  return instance;
}

absl::StatusOr<double> MinimizeLinear(const ConvexBody& body,
                                      const Vector& m) {
  if (m.size() != body.dimension()) {
    return absl::InvalidArgumentError("direction dimension mismatch");
  }
  if (const ConvexBody::Ball* b = body.ball()) {
    return b->center.dot(m) - b->radius * m.norm();
  }
  if (const ConvexBody::Box* b = body.box()) {
    return b->lower.cwiseProduct(m).cwiseMin(b->upper.cwiseProduct(m)).sum();
  }
  return absl::InvalidArgumentError(
      "linear objectives are unbounded below on the whole space");
}

absl::StatusOr<double> OptimalityGap(const LossFamily& family,
                                     const GaussianPopulation& population,
                                     const Vector& x_hat,
                                     const ConvexBody& body) {
  if (family.kind() != LossKind::kLinear) {
    return absl::UnimplementedError(
        "closed-form optimality gap needs linear losses");
  }
  if (x_hat.size() != population.mean.size()) {
    return absl::InvalidArgumentError("x_hat dimension mismatch");
  }
  absl::StatusOr<double> minimum = MinimizeLinear(body, population.mean);
  if (!minimum.ok()) return minimum.status();
  return x_hat.dot(population.mean) - *minimum;
}

}  // namespace expmech
