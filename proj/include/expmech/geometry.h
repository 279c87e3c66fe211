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

#ifndef EXPMECH_GEOMETRY_H_
#define EXPMECH_GEOMETRY_H_

#include <string>
#include <variant>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace expmech {

using Vector = Eigen::VectorXd;

// Closed convex support of a density: a Euclidean ball, an axis-aligned box,
// or the whole space. Immutable once built.
class ConvexBody {
 public:
  struct Ball {
    Vector center;
    double radius;
  };
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct AllSpace {};

  static absl::StatusOr<ConvexBody> L2Ball(Vector center, double radius);
  static absl::StatusOr<ConvexBody> MakeBox(Vector lower, Vector upper);
  static absl::StatusOr<ConvexBody> AllOf(int dimension);

  // Radius-r ball centred at the origin of R^d.
  static absl::StatusOr<ConvexBody> CenteredBall(int dimension, double radius);
  // [lo, hi]^d.
  static absl::StatusOr<ConvexBody> Cube(int dimension, double lo, double hi);

  int dimension() const { return dimension_; }
  bool bounded() const { return !std::holds_alternative<AllSpace>(shape_); }

  const Ball* ball() const { return std::get_if<Ball>(&shape_); }
  const Box* box() const { return std::get_if<Box>(&shape_); }

  // Exact closed-set membership. `x` must have dimension() entries; use the
  // free function Contains() for a checked variant.
  bool ContainsPoint(const Vector& x) const;

  // Centre of the ball or box; the origin for the whole space.
  Vector Center() const;

  std::string DebugString() const;

 private:
  using Shape = std::variant<Ball, Box, AllSpace>;
  ConvexBody(int dimension, Shape shape)
      : dimension_(dimension), shape_(std::move(shape)) {}

  int dimension_;
  Shape shape_;
};

absl::StatusOr<bool> Contains(const ConvexBody& body, const Vector& x);

// 2 * radius for balls, |upper - lower|_2 for boxes; error when unbounded.
absl::StatusOr<double> Diameter(const ConvexBody& body);

}  // namespace expmech

#endif  // EXPMECH_GEOMETRY_H_
