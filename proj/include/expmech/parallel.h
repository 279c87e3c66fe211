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

#ifndef EXPMECH_PARALLEL_H_
#define EXPMECH_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

#include "absl/status/status.h"

namespace expmech {

// Runs task(i) for i in [0, count) on up to `threads` workers. Per-item
// results must be written to caller-owned slots indexed by i so the merged
// output does not depend on scheduling. Returns the error of the lowest
// failing index, if any.
inline absl::Status ParallelFor(int count, int threads,
                                const std::function<absl::Status(int)>& task) {
  std::vector<absl::Status> statuses(std::max(count, 0));
  const int workers = std::clamp(threads, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) statuses[i] = task(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          statuses[i] = task(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const absl::Status& status : statuses) {
    if (!status.ok()) return status;
  }
  return absl::OkStatus();
}

}  // namespace expmech

#endif  // EXPMECH_PARALLEL_H_
