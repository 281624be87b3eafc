#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace certiq {

/// Process-wide worker count used by parallel_for. Defaults to the
/// CERTIQ_THREADS environment variable, else 1.
int thread_count();
void set_thread_count(int n);

namespace detail {
// Set inside parallel_for workers; nested loops then run serially.
inline thread_local bool in_parallel_region = false;
}  // namespace detail

/// Runs body(i) for i in [0, n). Iterations must not share mutable state;
/// the first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers =
      detail::in_parallel_region
          ? 1
          : std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    const bool outer = detail::in_parallel_region;
    detail::in_parallel_region = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
    detail::in_parallel_region = outer;
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace certiq
