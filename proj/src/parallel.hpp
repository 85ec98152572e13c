// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace matchlab::detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Hands out [begin, end) chunks of [0, total) to `threads` workers in
/// increasing order. body(worker, begin, end) must merge its own results;
/// callers keep outputs schedule-independent by taking index minima.
template <class Body>
void for_each_chunk(std::uint64_t total, unsigned threads, Body&& body) {
  if (total == 0) return;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), total));
  const std::uint64_t chunk = std::clamp<std::uint64_t>(total / (std::uint64_t{threads} * 64), 1, 4096);
  if (threads == 1) {
    for (std::uint64_t b = 0; b < total; b += chunk) body(0u, b, std::min(total, b + chunk));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::uint64_t b = next.fetch_add(chunk);
          if (b >= total) break;
          body(w, b, std::min(total, b + chunk));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace matchlab::detail
