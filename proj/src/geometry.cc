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

#include "expmech/geometry.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace expmech {

absl::StatusOr<ConvexBody> ConvexBody::L2Ball(Vector center, double radius) {
  if (center.size() == 0) {
    return absl::InvalidArgumentError("ball dimension must be positive");
  }
  if (!(radius > 0) || !std::isfinite(radius)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ball radius must be positive and finite, got ", radius));
  }
  if (!center.allFinite()) {
    return absl::InvalidArgumentError("ball center must be finite");
  }
  const int d = static_cast<int>(center.size());
  return ConvexBody(d, Ball{std::move(center), radius});
}

absl::StatusOr<ConvexBody> ConvexBody::MakeBox(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    return absl::InvalidArgumentError(
        "box bounds must be nonempty and of equal dimension");
  }
  if (!lower.allFinite() || !upper.allFinite()) {
    return absl::InvalidArgumentError("box bounds must be finite");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("box requires lower < upper in coordinate ", i));
    }
  }
  const int d = static_cast<int>(lower.size());
  return ConvexBody(d, Box{std::move(lower), std::move(upper)});
}

absl::StatusOr<ConvexBody> ConvexBody::AllOf(int dimension) {
  if (dimension <= 0) {
    return absl::InvalidArgumentError("dimension must be positive");
  }
  return ConvexBody(dimension, AllSpace{});
}

absl::StatusOr<ConvexBody> ConvexBody::CenteredBall(int dimension,
                                                    double radius) {
  if (dimension <= 0) {
    return absl::InvalidArgumentError("dimension must be positive");
  }
  return L2Ball(Vector::Zero(dimension), radius);
}

absl::StatusOr<ConvexBody> ConvexBody::Cube(int dimension, double lo,
                                            double hi) {
  if (dimension <= 0) {
    return absl::InvalidArgumentError("dimension must be positive");
  }
  return MakeBox(Vector::Constant(dimension, lo),
                 Vector::Constant(dimension, hi));
}

bool ConvexBody::ContainsPoint(const Vector& x) const {
  if (const Ball* b = ball()) {
    return (x - b->center).squaredNorm() <= b->radius * b->radius;
  }
  if (const Box* b = box()) {
    return (x.array() >= b->lower.array()).all() &&
           (x.array() <= b->upper.array()).all();
  }
  return x.allFinite();
}

Vector ConvexBody::Center() const {
  if (const Ball* b = ball()) return b->center;
  if (const Box* b = box()) return 0.5 * (b->lower + b->upper);
  return Vector::Zero(dimension_);
}

std::string ConvexBody::DebugString() const {
  if (const Ball* b = ball()) {
    return absl::StrCat("l2_ball(d=", dimension_, ", radius=", b->radius, ")");
  }
  if (box() != nullptr) return absl::StrCat("box(d=", dimension_, ")");
  return absl::StrCat("all_space(d=", dimension_, ")");
}

absl::StatusOr<bool> Contains(const ConvexBody& body, const Vector& x) {
  if (x.size() != body.dimension()) {
    return absl::InvalidArgumentError(
        absl::StrCat("point has dimension ", x.size(), ", body has ",
                     body.dimension()));
  }
  return body.ContainsPoint(x);
}

absl::StatusOr<double> Diameter(const ConvexBody& body) {
  if (const ConvexBody::Ball* b = body.ball()) return 2 * b->radius;
  if (const ConvexBody::Box* b = body.box()) return (b->upper - b->lower).norm();
  return absl::InvalidArgumentError("the whole space has no finite diameter");
}

}  // namespace expmech
