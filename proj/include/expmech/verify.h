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

// Numerical oracles used to check the sampler and the mechanism: adaptive
// quadrature, grid-normalised target densities in one and two dimensions,
// binned TV, Kolmogorov-Smirnov and sorted-matching Wasserstein estimators,
// and a Gaussian concentration probe.

#ifndef EXPMECH_VERIFY_H_
#define EXPMECH_VERIFY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "expmech/geometry.h"
#include "expmech/random.h"

namespace expmech {

struct QuadratureOptions {
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  int intervals = 0;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b], bisecting the interval with the
// largest error estimate. Fails with ResourceExhausted when the interval cap
// is reached before the tolerance.
absl::StatusOr<QuadratureResult> Integrate(
    const std::function<double(double)>& f, double a, double b,
    const QuadratureOptions& options = {});

struct ClaimIntegrals {
  // int_0^inf e^{-t} Phi(a - t/gamma) dt and its closed form.
  double lhs1 = 0;
  double rhs1 = 0;
  // int_0^inf e^{t} Phi(a - t/gamma) dt and its closed form.
  double lhs2 = 0;
  double rhs2 = 0;
};

// Both integrals are truncated where the integrand falls 40 standard units
// past its peak.
absl::StatusOr<ClaimIntegrals> CheckClaimIntegrals(double a, double gamma);

inline constexpr int kMinGridCells = 2000;

// Normalised density exp(-F) / Z on the nodes of a regular grid over the
// bounding box of a one- or two-dimensional body. Nodes outside the body
// carry zero density. Node (i0, i1) is stored at i0 + (cells + 1) * i1.
struct GridDensity {
  int dimension = 0;
  Vector lower;
  Vector upper;
  // Per axis; always even.
  int cells = 0;
  std::vector<double> log_density;
  std::vector<double> density;
  // log of the Simpson integral of exp(-F).
  double log_normalizer = 0;

  double step(int axis) const { return (upper[axis] - lower[axis]) / cells; }
  int nodes_per_axis() const { return cells + 1; }
  Vector Node(int i0, int i1 = 0) const;
  // Composite Simpson integral of the stored density; 1 up to rounding.
  double Mass() const;
};

// Potential F on R^d, d <= 2. Returning +inf marks points outside the target
// support.
using Potential = std::function<double(const Vector&)>;

absl::StatusOr<GridDensity> GridTarget(const Potential& potential,
                                       const ConvexBody& body,
                                       int cells = kMinGridCells);

// Simpson mass of each of bins^d equal bins; cells must be an even multiple of
// bins. Bin (b0, b1) is stored at b0 + bins * b1.
absl::StatusOr<std::vector<double>> BinMasses(const GridDensity& grid,
                                              int bins);

// Inverse-CDF draws from the grid density, piecewise constant per cell.
absl::StatusOr<std::vector<Vector>> SampleGrid(const GridDensity& grid,
                                               int count, Rng& rng);

inline constexpr int kMinTvSamples = 10'000;
inline constexpr int kBootstrapResamples = 200;
inline constexpr std::uint64_t kBootstrapSeed = 0x7f4a7c15u;

struct TvResult {
  double estimate = 0;
  // Percentile bootstrap 95% interval.
  double ci_low = 0;
  double ci_high = 0;
  // Fraction of samples outside the grid box; counted toward the estimate.
  double outside = 0;
  std::vector<double> empirical;
  std::vector<double> oracle;
};

// Half the L1 distance between the binned empirical law and the grid oracle.
// A lower bound on the true TV up to sampling noise.
absl::StatusOr<TvResult> TvEstimate(const std::vector<Vector>& samples,
                                    const GridDensity& oracle, int bins);

// Columns bin,empirical,oracle.
std::string TvTableCsv(const TvResult& result);

struct ConcentrationCheck {
  double t = 0;
  double empirical_tail = 0;
  double bound = 0;
  double slack = 0;
  bool pass = false;
};

// Compares Pr[l - E l >= t] with exp(-t^2 / (2 eta G^2)) plus three binomial
// standard errors. E l is the sample mean unless `mean` is given.
std::vector<ConcentrationCheck> ConcentrationProbe(
    const std::vector<double>& draws, double eta, double lipschitz,
    const std::vector<double>& t_grid, std::optional<double> mean = {});

struct KsResult {
  double statistic = 0;
  double p_value = 0;
};

// One-sample Kolmogorov-Smirnov test against `cdf`, asymptotic p-value with
// the small-sample correction of the Kolmogorov distribution argument.
absl::StatusOr<KsResult> KsTest(std::vector<double> samples,
                                const std::function<double(double)>& cdf);

// Survival function of the Kolmogorov distribution.
double KolmogorovSurvival(double lambda);

struct W1Result {
  double estimate = 0;
  double ci_low = 0;
  double ci_high = 0;
};

// W1 between two empirical laws on R as the integral of |F_a - F_b|; equals
// sorted matching when the sizes agree. Bootstrap interval as in TvEstimate.
absl::StatusOr<W1Result> SortedW1(std::vector<double> a,
                                  std::vector<double> b,
                                  int resamples = kBootstrapResamples);

}  // namespace expmech

#endif  // EXPMECH_VERIFY_H_
