#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace scarlet {

/// Runs fn(i) for i in [0, n) on at most `max_inflight` threads. If any call
/// throws, the exception from the lowest failing index is rethrown after all
/// workers finish, so failures are reported the same way on every run.
template <typename Fn>
void parallel_for_index(std::size_t n, std::size_t max_inflight, Fn&& fn) {
  if (n == 0) return;
  std::size_t workers = std::clamp<std::size_t>(max_inflight, 1, n);
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto body = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace scarlet
