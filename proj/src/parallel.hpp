/*
 * Copyright 2026 The convbound authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CONVBOUND_SRC_PARALLEL_HPP
#define CONVBOUND_SRC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace convbound::detail {

/// Runs body(i) for i in [0, count) across up to `threads` workers. Work is
/// claimed from a shared counter, so any partition yields the same results
/// as long as body(i) writes only to slot i. The first exception is
/// rethrown on the caller thread.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const int workers = std::max(
      1, std::min<int>(threads, static_cast<int>(std::min<std::size_t>(
                                    count, 64))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace convbound::detail

#endif  // CONVBOUND_SRC_PARALLEL_HPP
