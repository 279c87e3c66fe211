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

#ifndef EXPMECH_PRIVACY_H_
#define EXPMECH_PRIVACY_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace expmech {

// An (epsilon, delta) differential privacy guarantee.
struct PrivacyBudget {
  double epsilon = 0;
  double delta = 0;

  // epsilon >= 0 and 0 < delta < 1.
  absl::Status Validate() const;
};

// Mean shift s >= 0 between N(0, 1) and N(s, 1). A mechanism whose privacy
// curve is dominated by this pair is s-GDP.
struct GaussianShift {
  double s = 0;
};

enum class DivergenceKind { kRenyi, kKl };

struct DivergenceBound {
  DivergenceKind kind = DivergenceKind::kKl;
  // Only meaningful for kRenyi; always > 1 there.
  double order = 0;
  double value = 0;
};

struct DivergenceBounds {
  DivergenceBound renyi;
  DivergenceBound kl;
};

// Standard normal CDF. Saturates to exactly 0 or 1 far in the tails.
double NormalCdf(double x);

// log(NormalCdf(x)), accurate for very negative x where the CDF underflows.
double LogNormalCdf(double x);

// Inverse of NormalCdf on (0, 1); returns -inf / +inf at 0 / 1.
double NormalQuantile(double p);

// Privacy curve of the pair (N(0,1), N(s,1)):
//   delta(eps) = Phi(-eps/s + s/2) - e^eps Phi(-eps/s - s/2).
// The second term is evaluated in log space so large eps never overflows.
double GaussianDelta(GaussianShift shift, double epsilon);

// Tradeoff function of (N(0,1), N(s,1)): T(z) = Phi(Phi^{-1}(1 - z) - s).
double GaussianTradeoff(GaussianShift shift, double z);

// Largest shift certified to satisfy GaussianDelta(s, eps) <= delta.
//
// By default this is the closed form
//   s = sqrt(2 log(1/(2 delta)) + 2 eps) - sqrt(2 log(1/(2 delta))),
// which is valid for 0 < delta < 1/2. With `tighten`, the curve itself is
// bisected for the largest admissible s, which is never smaller than the
// closed form. The result is re-verified against GaussianDelta either way.
absl::StatusOr<GaussianShift> CalibrateShift(const PrivacyBudget& budget,
                                             bool tighten = false);

// Renyi (order alpha) and KL divergence bounds alpha k G^2 / (2 mu) and
// k G^2 / (2 mu) between exponential-mechanism outputs on neighbouring data.
absl::StatusOr<DivergenceBounds> ComputeDivergenceBounds(double k,
                                                         double lipschitz,
                                                         double mu,
                                                         double alpha);

}  // namespace expmech

#endif  // EXPMECH_PRIVACY_H_
