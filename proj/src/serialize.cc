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

#include "expmech/serialize.h"

#include <string>

#include "absl/strings/str_cat.h"

namespace expmech {
namespace {

absl::StatusOr<double> NumberField(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    return absl::InvalidArgumentError(absl::StrCat("missing field '", key, "'"));
  }
  if (!j[key].is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", key, "' must be a number"));
  }
  return j[key].get<double>();
}

absl::StatusOr<Vector> VectorField(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    return absl::InvalidArgumentError(absl::StrCat("missing field '", key, "'"));
  }
  absl::StatusOr<Vector> v = VectorFromJson(j[key]);
  if (!v.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", key, "': ", v.status().message()));
  }
  return v;
}

}  // namespace

Json VectorToJson(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

absl::StatusOr<Vector> VectorFromJson(const Json& j) {
  if (!j.is_array() || j.empty()) {
    return absl::InvalidArgumentError("expected a non-empty array of numbers");
  }
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      return absl::InvalidArgumentError("expected a non-empty array of numbers");
    }
    v[i] = j[i].get<double>();
  }
  return v;
}

Json BodyToJson(const ConvexBody& body) {
  Json out;
  if (const ConvexBody::Ball* b = body.ball()) {
    out["type"] = "l2_ball";
    out["center"] = VectorToJson(b->center);
    out["radius"] = b->radius;
  } else if (const ConvexBody::Box* b = body.box()) {
    out["type"] = "box";
    out["lower"] = VectorToJson(b->lower);
    out["upper"] = VectorToJson(b->upper);
  } else {
    out["type"] = "all_space";
    out["dimension"] = body.dimension();
  }
  return out;
}

absl::StatusOr<ConvexBody> BodyFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    return absl::InvalidArgumentError("body needs a string field 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "l2_ball") {
    absl::StatusOr<Vector> center = VectorField(j, "center");
    if (!center.ok()) return center.status();
    absl::StatusOr<double> radius = NumberField(j, "radius");
    if (!radius.ok()) return radius.status();
    return ConvexBody::L2Ball(*std::move(center), *radius);
  }
  if (type == "box") {
    absl::StatusOr<Vector> lower = VectorField(j, "lower");
    if (!lower.ok()) return lower.status();
    absl::StatusOr<Vector> upper = VectorField(j, "upper");
    if (!upper.ok()) return upper.status();
    return ConvexBody::MakeBox(*std::move(lower), *std::move(upper));
  }
  if (type == "all_space") {
    if (!j.contains("dimension") || !j["dimension"].is_number_integer()) {
      return absl::InvalidArgumentError("all_space needs integer 'dimension'");
    }
    return ConvexBody::AllOf(j["dimension"].get<int>());
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown body type '", type, "'"));
}

Json DatasetToJson(const Dataset& data) {
  Json samples = Json::array();
  for (const Vector& s : data.samples) samples.push_back(VectorToJson(s));
  Json out;
  out["samples"] = std::move(samples);
  return out;
}

absl::StatusOr<Dataset> DatasetFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("samples") || !j["samples"].is_array() ||
      j["samples"].empty()) {
    return absl::InvalidArgumentError("dataset needs a non-empty 'samples'");
  }
  Dataset data;
  for (const Json& row : j["samples"]) {
    absl::StatusOr<Vector> s = VectorFromJson(row);
    if (!s.ok()) return s.status();
    data.samples.push_back(*std::move(s));
  }
  if (absl::Status status = data.Validate(data.dimension()); !status.ok()) {
    return status;
  }
  return data;
}

absl::StatusOr<ScheduleConstants> ScheduleConstantsFromJson(const Json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "pinned") return ScheduleConstants::Pinned();
    if (name == "desk") return ScheduleConstants::Desk();
    return absl::InvalidArgumentError(
        absl::StrCat("unknown schedule profile '", name, "'"));
  }
  if (!j.is_object()) {
    return absl::InvalidArgumentError("schedule must be a name or an object");
  }
  ScheduleConstants c;
  for (const auto& [key, field] :
       {std::pair{"c_t", &c.c_t}, std::pair{"c_l", &c.c_l},
        std::pair{"eta_concentration", &c.eta_concentration},
        std::pair{"eta_series", &c.eta_series}}) {
    absl::StatusOr<double> v = NumberField(j, key);
    if (!v.ok()) return v.status();
    if (!(*v > 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("schedule constant '", key, "' must be positive"));
    }
    *field = *v;
  }
  return c;
}

Json ScheduleToJson(const SamplerSchedule& schedule) {
  Json out;
  out["eta"] = schedule.eta;
  out["T"] = schedule.outer_steps;
  out["delta_inner"] = schedule.delta_inner;
  out["L"] = schedule.series_threshold;
  out["delta_tv"] = schedule.delta_tv;
  out["x0"] = VectorToJson(schedule.x0);
  out["D_init"] = schedule.d_init;
  out["rounds"] = schedule.rounds;
  out["constants"] = {{"c_t", schedule.constants.c_t},
                      {"c_l", schedule.constants.c_l},
                      {"eta_concentration", schedule.constants.eta_concentration},
                      {"eta_series", schedule.constants.eta_series}};
  return out;
}

Json SamplerReportToJson(const SamplerReport& report, bool include_samples) {
  Json out;
  out["outer_steps"] = report.outer_steps;
  out["total_value_queries"] = report.total_value_queries;
  out["base_draws"] = report.base_draws;
  out["estimator_calls"] = report.estimator_calls;
  out["out_of_range"] = report.out_of_range;
  out["inner_attempts_histogram"] = report.inner_attempts_histogram;
  out["num_samples"] = report.samples.size();
  if (include_samples) {
    Json samples = Json::array();
    for (const Vector& s : report.samples) samples.push_back(VectorToJson(s));
    out["samples"] = std::move(samples);
  }
  return out;
}

Json RunReportToJson(const RunReport& report) {
  Json out;
  out["epsilon"] = report.epsilon;
  out["delta"] = report.delta;
  out["certified_delta"] = report.certified_delta;
  out["delta_tv"] = report.delta_tv;
  out["effective_delta"] = report.effective_delta;
  out["k"] = report.k;
  out["mu"] = report.mu;
  out["sampler_lipschitz"] = report.sampler_lipschitz;
  out["sampler_mu"] = report.sampler_mu;
  out["eta"] = report.schedule.eta;
  out["T"] = report.schedule.outer_steps;
  out["queries"] = report.value_queries;
  out["excess_risk_estimate"] = report.excess_risk_estimate;
  out["wall_time_ms"] = report.wall_time_ms;
  out["seed"] = report.seed;
  out["schedule"] = ScheduleToJson(report.schedule);
  out["sampler"] = SamplerReportToJson(report.sampler);
  return out;
}

}  // namespace expmech
