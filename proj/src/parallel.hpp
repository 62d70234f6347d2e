// Copyright 2026 The gdn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "gdn/params.hpp"

namespace gdn::detail {

/// Samples per reduction block. Block boundaries depend only on the batch
/// size, so blocked reductions give the same bits for any worker count.
inline constexpr Index kBlockSize = 64;

inline Index block_count(Index n) { return (n + kBlockSize - 1) / kBlockSize; }

/// Run fn(block) for every block index on up to `threads` workers. The first
/// exception thrown by any block is rethrown on the calling thread.
template <typename Fn>
void parallel_blocks(Index blocks, int threads, Fn&& fn) {
  const int workers = static_cast<int>(std::clamp<Index>(threads, 1, std::max<Index>(blocks, 1)));
  if (workers == 1) {
    for (Index b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (Index b = next++; b < blocks; b = next++) {
        try {
          fn(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise tree reduction of per-block partials, in a fixed order.
template <typename T>
T tree_reduce(std::vector<T> parts) {
  if (parts.empty()) return T{};
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2)
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) parts[i] += parts[i + stride];
  return std::move(parts.front());
}

}  // namespace gdn::detail
