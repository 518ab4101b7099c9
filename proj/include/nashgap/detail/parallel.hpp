#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nashgap {

/// Runs fn(i) for i = 0..count-1 on `threads` workers. Results are indexed by
/// i, so the output does not depend on scheduling.
template <typename Fn>
auto parallel_map(std::int64_t count, int threads, Fn fn)
    -> std::vector<decltype(fn(std::int64_t{}))> {
  using R = decltype(fn(std::int64_t{}));
  std::vector<R> out(static_cast<std::size_t>(count));
  if (threads <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::int64_t>(threads, count);
  for (std::int64_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace nashgap
