// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace wtc {

inline uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

// Bits needed to distinguish n distinct values (n >= 1). ceil(log2(1)) == 0.
inline uint32_t ceil_log2(uint64_t n) {
  return n <= 1 ? 0u : static_cast<uint32_t>(std::bit_width(n - 1));
}

namespace detail {

// Worker cap for per-layer parallelism: WTC_THREADS wins over the hardware
// count; anything unparsable or zero falls back to 1.
inline unsigned thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const char* env = std::getenv("WTC_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || v == 0) return 1;
  return static_cast<unsigned>(v < hw ? v : hw);
}

// Runs fn(0..n-1) on up to thread_cap() workers. Results must be written to
// disjoint slots by index; the first exception (if any) is rethrown after all
// workers join so partial failures cannot leak detached threads.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  unsigned workers = thread_cap();
  if (n <= 1 || workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);

  std::atomic<size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;

  auto body = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace detail
}  // namespace wtc
