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

#include "expmech/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/strings/str_cat.h"

namespace expmech {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this argument erfc underflows, so the CDF is handled by its
// asymptotic expansion in log space.
constexpr double kLogCdfAsymptoticThreshold = -37.0;

// Initial guess for the quantile (rational approximation by P. J. Acklam,
// relative error below 1.2e-9), polished by Halley steps afterwards.
double AcklamQuantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - kLow) {
    const double q = std::sqrt(-2 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace

absl::Status PrivacyBudget::Validate() const {
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and nonnegative, got ", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

double NormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double LogNormalCdf(double x) {
  if (x > 0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  if (x >= kLogCdfAsymptoticThreshold) return std::log(NormalCdf(x));
  if (x == -kInf) return -kInf;
  // Phi(x) = phi(x) / |x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
  const double inv2 = 1.0 / (x * x);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2 * k - 1) * inv2;
    series += term;
  }
  return -0.5 * x * x - std::log(-x) -
         0.5 * std::log(2 * std::numbers::pi) + std::log(series);
}

double NormalQuantile(double p) {
  if (std::isnan(p) || p < 0 || p > 1) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (p == 0) return -kInf;
  if (p == 1) return kInf;
  // Refine on the lower tail and mirror, so tiny p keeps full relative
  // accuracy.
  if (p > 0.5) return -NormalQuantile(1 - p);
  double x = AcklamQuantile(p);
  for (int i = 0; i < 3; ++i) {
    const double err = NormalCdf(x) - p;
    const double u = err * std::sqrt(2 * std::numbers::pi) *
                     std::exp(0.5 * x * x);
    const double next = x - u / (1 + 0.5 * x * u);
    if (!std::isfinite(next)) break;
    if (next == x) break;
    x = next;
  }
  return x;
}

double GaussianDelta(GaussianShift shift, double epsilon) {
  const double s = shift.s;
  if (!(s > 0)) return 0;
  if (epsilon == kInf) return 0;
  if (s == kInf) return 1;
  const double upper = -epsilon / s + 0.5 * s;
  const double lower = -epsilon / s - 0.5 * s;
  const double log_first = LogNormalCdf(upper);
  if (log_first == -kInf) return 0;
  const double log_second = epsilon + LogNormalCdf(lower);
  // Phi(upper) (1 - e^{eps} Phi(lower) / Phi(upper)).
  const double delta =
      std::exp(log_first) * -std::expm1(log_second - log_first);
  return std::clamp(delta, 0.0, 1.0);
}

double GaussianTradeoff(GaussianShift shift, double z) {
  z = std::clamp(z, 0.0, 1.0);
  // Phi^{-1}(1 - z) = -Phi^{-1}(z); the right side keeps small z accurate.
  return std::clamp(NormalCdf(-NormalQuantile(z) - shift.s), 0.0, 1.0);
}

absl::StatusOr<GaussianShift> CalibrateShift(const PrivacyBudget& budget,
                                             bool tighten) {
  if (absl::Status status = budget.Validate(); !status.ok()) return status;
  if (!(budget.epsilon > 0)) {
    return absl::InvalidArgumentError("calibration requires epsilon > 0");
  }
  if (!(budget.delta < 0.5)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "closed-form calibration requires delta < 1/2, got ", budget.delta));
  }
  const double log_term = 2 * std::log(1 / (2 * budget.delta));
  // sqrt(a + 2 eps) - sqrt(a), written without cancellation.
  double s = 2 * budget.epsilon /
             (std::sqrt(log_term + 2 * budget.epsilon) + std::sqrt(log_term));

  if (tighten) {
    double lo = s;
    double hi = std::max(2 * s, 1e-3);
    while (GaussianDelta({hi}, budget.epsilon) <= budget.delta) {
      lo = hi;
      hi *= 2;
      if (hi > 1e6) break;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (GaussianDelta({mid}, budget.epsilon) <= budget.delta) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    s = lo;
  }

  if (!(s > 0) || GaussianDelta({s}, budget.epsilon) > budget.delta) {
    return absl::InternalError(absl::StrCat(
        "calibrated shift ", s, " fails re-verification at epsilon=",
        budget.epsilon, " delta=", budget.delta));
  }
  return GaussianShift{s};
}

absl::StatusOr<DivergenceBounds> ComputeDivergenceBounds(double k,
                                                         double lipschitz,
                                                         double mu,
                                                         double alpha) {
  if (!(k > 0)) return absl::InvalidArgumentError("k must be positive");
  if (!(mu > 0)) return absl::InvalidArgumentError("mu must be positive");
  if (!(lipschitz >= 0)) {
    return absl::InvalidArgumentError("Lipschitz constant must be >= 0");
  }
  if (!(alpha > 1)) {
    return absl::InvalidArgumentError("Renyi order alpha must exceed 1");
  }
  const double kl = k * lipschitz * lipschitz / (2 * mu);
  DivergenceBounds bounds;
  bounds.renyi = {DivergenceKind::kRenyi, alpha, alpha * kl};
  bounds.kl = {DivergenceKind::kKl, 0, kl};
  return bounds;
}

}  // namespace expmech
