#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rdc {

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Callers write results
/// by index, so output never depends on scheduling. The first exception is
/// rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t n, std::size_t jobs, Body&& body) {
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  threads.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace rdc
