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

#include "expmech/verify.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "absl/strings/str_cat.h"
#include "expmech/io.h"
#include "expmech/privacy.h"

namespace expmech {
namespace {

// Kronrod abscissae on [-1, 1] (non-negative half). Odd entries are the
// 7-point Gauss nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a = 0;
  double b = 0;
  double value = 0;
  double error = 0;

  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment KronrodSegment(const std::function<double(double)>& f, double a,
                       double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

void BoundingBox(const ConvexBody& body, Vector& lower, Vector& upper) {
  if (const ConvexBody::Ball* b = body.ball()) {
    lower = b->center.array() - b->radius;
    upper = b->center.array() + b->radius;
  } else if (const ConvexBody::Box* b = body.box()) {
    lower = b->lower;
    upper = b->upper;
  }
}

double SimpsonWeight(int i, int cells, double h) {
  if (i == 0 || i == cells) return h / 3;
  return (i % 2 == 1 ? 4 : 2) * h / 3;
}

// Flattened bin of x, or -1 outside the grid box.
int BinOf(const Vector& x, const GridDensity& grid, int bins) {
  if (x.size() != grid.dimension) return -1;
  int index = 0;
  int stride = 1;
  for (int axis = 0; axis < grid.dimension; ++axis) {
    const double lo = grid.lower[axis];
    const double hi = grid.upper[axis];
    if (!(x[axis] >= lo && x[axis] <= hi)) return -1;
    int b = static_cast<int>(std::floor((x[axis] - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    index += b * stride;
    stride *= bins;
  }
  return index;
}

double HalfL1(const std::vector<std::int64_t>& counts, std::int64_t outside,
              const std::vector<double>& oracle, double total) {
  double sum = static_cast<double>(outside) / total;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    sum += std::abs(static_cast<double>(counts[i]) / total - oracle[i]);
  }
  return 0.5 * sum;
}

double Percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

// Assumes both inputs sorted.
double W1Sorted(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() == b.size()) {
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
    return total / static_cast<double>(a.size());
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double total = 0;
  double previous = std::min(a.front(), b.front());
  while (i < a.size() || j < b.size()) {
    const double next = (j == b.size() || (i < a.size() && a[i] <= b[j]))
                            ? a[i]
                            : b[j];
    total += std::abs(static_cast<double>(i) / na -
                      static_cast<double>(j) / nb) *
             (next - previous);
    previous = next;
    while (i < a.size() && a[i] == next) ++i;
    while (j < b.size() && b[j] == next) ++j;
  }
  return total;
}

}  // namespace

absl::StatusOr<QuadratureResult> Integrate(
    const std::function<double(double)>& f, double a, double b,
    const QuadratureOptions& options) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    return absl::InvalidArgumentError("integration limits must be finite");
  }
  if (a == b) return QuadratureResult{0, 0, 0};
  const double sign = a < b ? 1 : -1;
  if (b < a) std::swap(a, b);

  std::priority_queue<Segment> heap;
  Segment first = KronrodSegment(f, a, b);
  double value = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(options.abs_tol, options.rel_tol * std::abs(value))) {
    if (intervals >= options.max_intervals) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "quadrature did not converge on [", a, ", ", b, "] within ",
          options.max_intervals, " intervals (error ", error, ")"));
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = KronrodSegment(f, worst.a, mid);
    const Segment right = KronrodSegment(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (!std::isfinite(value)) {
      return absl::InvalidArgumentError("integrand is not finite");
    }
  }
  // Re-sum to shed the drift of the running updates.
  value = 0;
  error = 0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return QuadratureResult{sign * value, error, intervals};
}

absl::StatusOr<ClaimIntegrals> CheckClaimIntegrals(double a, double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma) || !std::isfinite(a)) {
    return absl::InvalidArgumentError("need finite a and gamma > 0");
  }
  QuadratureOptions options;
  options.rel_tol = 1e-12;
  options.abs_tol = 1e-14;

  auto piecewise = [&](const std::function<double(double)>& f, double knee,
                       double end) -> absl::StatusOr<double> {
    knee = std::clamp(knee, 0.0, end);
    double total = 0;
    for (auto [lo, hi] : {std::pair{0.0, knee}, std::pair{knee, end}}) {
      absl::StatusOr<QuadratureResult> part = Integrate(f, lo, hi, options);
      if (!part.ok()) return part.status();
      total += part->value;
    }
    return total;
  };

  ClaimIntegrals out;
  // e^{-t} Phi(a - t/gamma) drops off after the knee t = a gamma and
  // e^{-40} is negligible.
  absl::StatusOr<double> lhs1 = piecewise(
      [&](double t) { return std::exp(-t) * NormalCdf(a - t / gamma); },
      a * gamma, std::max(40.0, a * gamma + 40.0));
  if (!lhs1.ok()) return lhs1.status();
  // e^{t} Phi(a - t/gamma) peaks near t = gamma (a + gamma) and then decays
  // like a Gaussian of scale gamma in t.
  const double peak = gamma * (a + gamma);
  absl::StatusOr<double> lhs2 = piecewise(
      [&](double t) { return std::exp(t) * NormalCdf(a - t / gamma); }, peak,
      std::max(40.0 * gamma, peak + 40.0 * gamma));
  if (!lhs2.ok()) return lhs2.status();

  out.lhs1 = *lhs1;
  out.lhs2 = *lhs2;
  out.rhs1 = NormalCdf(a) -
             std::exp(gamma * gamma / 2 - a * gamma) * NormalCdf(a - gamma);
  out.rhs2 = -NormalCdf(a) +
             std::exp(gamma * gamma / 2 + a * gamma) * NormalCdf(a + gamma);
  return out;
}

Vector GridDensity::Node(int i0, int i1) const {
  Vector x(dimension);
  x[0] = lower[0] + i0 * step(0);
  if (dimension == 2) x[1] = lower[1] + i1 * step(1);
  return x;
}

double GridDensity::Mass() const {
  const int m = nodes_per_axis();
  double total = 0;
  if (dimension == 1) {
    for (int i = 0; i < m; ++i) {
      total += SimpsonWeight(i, cells, step(0)) * density[i];
    }
    return total;
  }
  for (int i1 = 0; i1 < m; ++i1) {
    const double w1 = SimpsonWeight(i1, cells, step(1));
    for (int i0 = 0; i0 < m; ++i0) {
      total += w1 * SimpsonWeight(i0, cells, step(0)) * density[i0 + m * i1];
    }
  }
  return total;
}

absl::StatusOr<GridDensity> GridTarget(const Potential& potential,
                                       const ConvexBody& body, int cells) {
  const int d = body.dimension();
  if (d > 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid oracle supports d <= 2, got d = ", d));
  }
  if (!body.bounded()) {
    return absl::InvalidArgumentError("grid oracle needs a bounded body");
  }
  if (cells < kMinGridCells || cells % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cells per axis must be even and >= ", kMinGridCells));
  }

  GridDensity grid;
  grid.dimension = d;
  grid.cells = cells;
  BoundingBox(body, grid.lower, grid.upper);
  const int m = grid.nodes_per_axis();
  const std::size_t total = d == 1 ? m : static_cast<std::size_t>(m) * m;
  grid.log_density.assign(total, -std::numeric_limits<double>::infinity());
  grid.density.assign(total, 0);

  std::vector<double> values(total, std::numeric_limits<double>::infinity());
  double minimum = std::numeric_limits<double>::infinity();
  for (int i1 = 0; i1 < (d == 1 ? 1 : m); ++i1) {
    for (int i0 = 0; i0 < m; ++i0) {
      const Vector x = grid.Node(i0, i1);
      if (!body.ContainsPoint(x)) continue;
      const double v = potential(x);
      if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
        return absl::InvalidArgumentError(
            absl::StrCat("potential is NaN or -inf at node (", i0, ", ", i1,
                         ")"));
      }
      values[i0 + static_cast<std::size_t>(m) * i1] = v;
      minimum = std::min(minimum, v);
    }
  }
  if (!std::isfinite(minimum)) {
    return absl::InvalidArgumentError("potential is infinite on the grid");
  }
  for (std::size_t i = 0; i < total; ++i) {
    grid.density[i] = std::exp(minimum - values[i]);
  }
  const double z = grid.Mass();
  grid.log_normalizer = std::log(z) - minimum;
  for (std::size_t i = 0; i < total; ++i) {
    grid.density[i] /= z;
    grid.log_density[i] = -values[i] - grid.log_normalizer;
  }
  return grid;
}

absl::StatusOr<std::vector<double>> BinMasses(const GridDensity& grid,
                                              int bins) {
  if (bins < 1 || grid.cells % bins != 0 || (grid.cells / bins) % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bins (", bins, ") must split ", grid.cells,
        " cells into blocks of even size"));
  }
  const int per = grid.cells / bins;
  const int m = grid.nodes_per_axis();
  // Simpson weight of node i inside the block that starts at `start`.
  auto weight = [&](int i, int start, int axis) {
    return SimpsonWeight(i - start, per, grid.step(axis));
  };
  std::vector<double> masses(grid.dimension == 1 ? bins : bins * bins, 0);
  if (grid.dimension == 1) {
    for (int b = 0; b < bins; ++b) {
      for (int i = b * per; i <= (b + 1) * per; ++i) {
        masses[b] += weight(i, b * per, 0) * grid.density[i];
      }
    }
    return masses;
  }
  for (int b1 = 0; b1 < bins; ++b1) {
    for (int b0 = 0; b0 < bins; ++b0) {
      double mass = 0;
      for (int i1 = b1 * per; i1 <= (b1 + 1) * per; ++i1) {
        const double w1 = weight(i1, b1 * per, 1);
        for (int i0 = b0 * per; i0 <= (b0 + 1) * per; ++i0) {
          mass += w1 * weight(i0, b0 * per, 0) * grid.density[i0 + m * i1];
        }
      }
      masses[b0 + bins * b1] = mass;
    }
  }
  return masses;
}

absl::StatusOr<std::vector<Vector>> SampleGrid(const GridDensity& grid,
                                               int count, Rng& rng) {
  if (count < 0) return absl::InvalidArgumentError("count must be >= 0");
  const int c = grid.cells;
  const int m = grid.nodes_per_axis();
  const int d = grid.dimension;
  std::vector<double> cumulative(d == 1 ? c : static_cast<std::size_t>(c) * c);
  double running = 0;
  for (std::size_t cell = 0; cell < cumulative.size(); ++cell) {
    const int i0 = static_cast<int>(cell % c);
    double mass;
    if (d == 1) {
      mass = 0.5 * (grid.density[i0] + grid.density[i0 + 1]);
    } else {
      const int i1 = static_cast<int>(cell / c);
      const std::size_t base = i0 + static_cast<std::size_t>(m) * i1;
      mass = 0.25 * (grid.density[base] + grid.density[base + 1] +
                     grid.density[base + m] + grid.density[base + m + 1]);
    }
    running += mass;
    cumulative[cell] = running;
  }
  if (!(running > 0)) return absl::InvalidArgumentError("grid has no mass");

  std::vector<Vector> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double u = rng.Uniform() * running;
    const std::size_t cell = std::min<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) -
            cumulative.begin(),
        cumulative.size() - 1);
    Vector x(d);
    x[0] = grid.lower[0] + (static_cast<double>(cell % c) + rng.Uniform()) *
                               grid.step(0);
    if (d == 2) {
      x[1] = grid.lower[1] + (static_cast<double>(cell / c) + rng.Uniform()) *
                                 grid.step(1);
    }
    out.push_back(std::move(x));
  }
  return out;
}

absl::StatusOr<TvResult> TvEstimate(const std::vector<Vector>& samples,
                                    const GridDensity& oracle, int bins) {
  if (samples.size() < static_cast<std::size_t>(kMinTvSamples)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "TV estimate needs >= ", kMinTvSamples, " samples, got ",
        samples.size()));
  }
  absl::StatusOr<std::vector<double>> masses = BinMasses(oracle, bins);
  if (!masses.ok()) return masses.status();

  std::vector<int> labels(samples.size());
  std::vector<std::int64_t> counts(masses->size(), 0);
  std::int64_t outside = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    labels[i] = BinOf(samples[i], oracle, bins);
    if (labels[i] < 0) {
      ++outside;
    } else {
      ++counts[labels[i]];
    }
  }
  const double n = static_cast<double>(samples.size());

  TvResult result;
  result.estimate = HalfL1(counts, outside, *masses, n);
  result.outside = static_cast<double>(outside) / n;
  result.oracle = *masses;
  result.empirical.resize(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) {
    result.empirical[b] = static_cast<double>(counts[b]) / n;
  }

  Rng rng(kBootstrapSeed);
  std::vector<double> replicates(kBootstrapResamples);
  for (double& replicate : replicates) {
    std::fill(counts.begin(), counts.end(), 0);
    outside = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const int label = labels[rng.Index(samples.size())];
      if (label < 0) {
        ++outside;
      } else {
        ++counts[label];
      }
    }
    replicate = HalfL1(counts, outside, *masses, n);
  }
  result.ci_low = Percentile(replicates, 0.025);
  result.ci_high = Percentile(replicates, 0.975);
  return result;
}

std::string TvTableCsv(const TvResult& result) {
  CsvTable table({"bin", "empirical", "oracle"});
  for (std::size_t b = 0; b < result.oracle.size(); ++b) {
    table.AddRow({absl::StrCat(b), FormatDouble(result.empirical[b]),
                  FormatDouble(result.oracle[b])});
  }
  return table.ToString();
}

std::vector<ConcentrationCheck> ConcentrationProbe(
    const std::vector<double>& draws, double eta, double lipschitz,
    const std::vector<double>& t_grid, std::optional<double> mean) {
  const double n = static_cast<double>(draws.size());
  const double center =
      mean ? *mean : std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  std::vector<ConcentrationCheck> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    ConcentrationCheck check;
    check.t = t;
    const auto exceed = std::count_if(draws.begin(), draws.end(), [&](double v) {
      return v - center >= t;
    });
    check.empirical_tail = static_cast<double>(exceed) / n;
    check.bound =
        std::min(1.0, std::exp(-t * t / (2 * eta * lipschitz * lipschitz)));
    check.slack = 3 * std::sqrt(check.bound * (1 - check.bound) / n);
    check.pass = check.empirical_tail <= check.bound + check.slack;
    out.push_back(check);
  }
  return out;
}

double KolmogorovSurvival(double lambda) {
  if (!(lambda > 0)) return 1;
  if (lambda < 1.18) {
    // Theta-function form; the alternating series converges slowly here.
    const double pi = 3.14159265358979323846;
    const double c = pi * pi / (8 * lambda * lambda);
    double sum = 0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-(2 * k - 1) * (2 * k - 1) * c);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::clamp(1 - std::sqrt(2 * pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

absl::StatusOr<KsResult> KsTest(std::vector<double> samples,
                                const std::function<double(double)>& cdf) {
  if (samples.empty()) return absl::InvalidArgumentError("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f,
                  f - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  return KsResult{d, KolmogorovSurvival((root + 0.12 + 0.11 / root) * d)};
}

absl::StatusOr<W1Result> SortedW1(std::vector<double> a, std::vector<double> b,
                                  int resamples) {
  if (a.empty() || b.empty()) return absl::InvalidArgumentError("no samples");
  if (resamples < 1) return absl::InvalidArgumentError("resamples must be >= 1");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  W1Result result;
  result.estimate = W1Sorted(a, b);

  Rng rng(kBootstrapSeed);
  std::vector<double> ra(a.size());
  std::vector<double> rb(b.size());
  std::vector<double> replicates(resamples);
  for (double& replicate : replicates) {
    for (double& v : ra) v = a[rng.Index(a.size())];
    for (double& v : rb) v = b[rng.Index(b.size())];
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    replicate = W1Sorted(ra, rb);
  }
  result.ci_low = Percentile(replicates, 0.025);
  result.ci_high = Percentile(replicates, 0.975);
  return result;
}

}  // namespace expmech
