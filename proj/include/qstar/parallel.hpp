#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qstar::detail {

/// Runs body(i) for i in [0, n) on a few worker threads. Each index is handled
/// exactly once; callers write results into per-index slots so the outcome is
/// independent of scheduling. The first exception thrown by any worker is
/// rethrown on the calling thread.
inline thread_local bool inside_parallel_region = false;

template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  // Nested calls run serially on the worker that reached them.
  if (workers <= 1 || inside_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        inside_parallel_region = true;
        try {
          for (std::size_t i = w; i < n; i += workers) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qstar::detail
