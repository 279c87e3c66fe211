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

// JSON forms of the configuration and report types.
//
//   body:      {"type": "l2_ball", "center": [...], "radius": r}
//              {"type": "box", "lower": [...], "upper": [...]}
//              {"type": "all_space", "dimension": d}
//   dataset:   {"samples": [[...], ...]}
//   schedule:  "pinned" | "desk" |
//              {"c_t": .., "c_l": .., "eta_concentration": .., "eta_series": ..}

#ifndef EXPMECH_SERIALIZE_H_
#define EXPMECH_SERIALIZE_H_

#include "absl/status/statusor.h"
#include "expmech/geometry.h"
#include "expmech/losses.h"
#include "expmech/mechanism.h"
#include "expmech/sampler.h"
#include "json.hpp"

namespace expmech {

using Json = nlohmann::ordered_json;

Json VectorToJson(const Vector& v);
absl::StatusOr<Vector> VectorFromJson(const Json& j);

Json BodyToJson(const ConvexBody& body);
absl::StatusOr<ConvexBody> BodyFromJson(const Json& j);

Json DatasetToJson(const Dataset& data);
absl::StatusOr<Dataset> DatasetFromJson(const Json& j);

absl::StatusOr<ScheduleConstants> ScheduleConstantsFromJson(const Json& j);
Json ScheduleToJson(const SamplerSchedule& schedule);

// Counters are written as JSON integers. Samples are omitted unless asked.
Json SamplerReportToJson(const SamplerReport& report,
                         bool include_samples = false);
Json RunReportToJson(const RunReport& report);

}  // namespace expmech

#endif  // EXPMECH_SERIALIZE_H_
