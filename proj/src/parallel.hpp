#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "types.hpp"

namespace bolasso {

namespace detail {
inline thread_local bool in_parallel_region = false;

inline int max_threads() {
  if (const char* env = std::getenv("BOLASSO_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}
}  // namespace detail

// Runs fn(i) for i in [0, n). Items must be independent; results are written
// by the caller into per-index slots, so the outcome does not depend on the
// thread count. Nested calls degrade to serial execution.
inline void parallel_for(Index n, const std::function<void(Index)>& fn) {
  if (n <= 0) return;
  const int threads = detail::in_parallel_region ? 1 : std::min<int>(detail::max_threads(), static_cast<int>(n));
  if (threads <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }

  std::exception_ptr first_error = nullptr;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      detail::in_parallel_region = true;
      // Static block partition: item order inside a thread is ascending, and
      // item->slot assignment is independent of the schedule.
      const Index lo = n * t / threads;
      const Index hi = n * (t + 1) / threads;
      for (Index i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          break;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bolasso
