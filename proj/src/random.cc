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

#include "expmech/random.h"

#include <cmath>

namespace expmech {
namespace {

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Exponential proposal shifted to a >= 0, truncated to [a, b]; the ratio
// target / proposal is maximal at z = lambda, which gives the acceptance
// exp(-(z - lambda)^2 / 2).
double RightTail(Rng& rng, double a, double b) {
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4));
  const double span = -std::expm1(-lambda * (b - a));
  while (true) {
    const double z = a - std::log1p(-rng.Uniform() * span) / lambda;
    if (z > b) continue;
    const double gap = z - lambda;
    if (rng.Uniform() <= std::exp(-0.5 * gap * gap)) return z;
  }
}

}  // namespace

double Rng::TruncatedNormal(double lower, double upper) {
  if (lower >= 0) return RightTail(*this, lower, upper);
  if (upper <= 0) return -RightTail(*this, -upper, -lower);
  if (upper - lower >= 2) {
    while (true) {
      const double z = Normal();
      if (z >= lower && z <= upper) return z;
    }
  }
  // Short interval around the mode.
  while (true) {
    const double z = lower + (upper - lower) * Uniform();
    if (Uniform() <= std::exp(-0.5 * z * z)) return z;
  }
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xd1b54a32d192ed03ULL);
  std::seed_seq seq{
      static_cast<std::uint32_t>(SplitMix64(state)),
      static_cast<std::uint32_t>(SplitMix64(state)),
      static_cast<std::uint32_t>(SplitMix64(state)),
      static_cast<std::uint32_t>(SplitMix64(state)),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32),
  };
  engine_.seed(seq);
}

}  // namespace expmech
