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

#ifndef EXPMECH_RANDOM_H_
#define EXPMECH_RANDOM_H_

#include <cstdint>
#include <random>

namespace expmech {

// Seeded random stream. Streams with the same (seed, stream) pair produce
// identical sequences; distinct stream ids give independent chains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Normal() { return normal_(engine_); }
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::uint64_t Index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

  // Standard normal conditioned on [lower, upper]; either end may be
  // infinite. Exact for any interval, including ones deep in a tail.
  double TruncatedNormal(double lower, double upper);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace expmech

#endif  // EXPMECH_RANDOM_H_
