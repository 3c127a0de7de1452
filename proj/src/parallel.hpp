#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tkf::detail {

// Runs body(i) for i in [0, count), splitting contiguous blocks across
// threads (0 = hardware concurrency). Outputs must be indexed by i so the
// partition is invisible; if bodies throw, the smallest index wins.
template <typename Body>
void parallel_for_index(std::int64_t count, int threads, Body&& body) {
  int T = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : threads;
  if (T < 1) T = 1;
  if (count < T) T = static_cast<int>(std::max<std::int64_t>(count, 1));
  if (T == 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex mx;
  std::exception_ptr first_ex;
  std::int64_t first_idx = -1;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(T));
  for (int k = 0; k < T; ++k) {
    std::int64_t lo = count * k / T, hi = count * (k + 1) / T;
    pool.emplace_back([&, lo, hi] {
      for (std::int64_t i = lo; i < hi; ++i) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> g{mx};
          if (first_idx < 0 || i < first_idx) {
            first_idx = i;
            first_ex = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_ex) std::rethrow_exception(first_ex);
}

}  // namespace tkf::detail
