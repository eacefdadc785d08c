// Copyright 2026 The moofair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "moofair/numeric.hpp"

namespace moofair {

// Worker count: MOOFAIR_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
inline int thread_count() {
  if (const char* env = std::getenv("MOOFAIR_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) {
        return n;
      }
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(i) for i in [0, n) over contiguous static chunks. Results are
// independent of the thread count as long as fn(i) only writes slot i.
// The first exception thrown by a worker is rethrown.
template <typename F>
void parallel_for(Index n, F&& fn, int threads = thread_count()) {
  const Index workers = std::min<Index>(threads, n);
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const Index begin = n * w / workers;
      const Index end = n * (w + 1) / workers;
      try {
        for (Index i = begin; i < end; ++i) {
          fn(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace moofair
