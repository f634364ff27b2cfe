#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace randset {

// Runs fn(i) for i in [begin, end) across up to num_threads workers in
// contiguous chunks. Work items must be independent; every caller here keys
// its randomness by index, so results do not depend on the worker count.
inline void parallel_for(long long begin, long long end, int num_threads,
                         const std::function<void(long long)>& fn) {
  const long long count = end - begin;
  if (count <= 0) return;
  if (num_threads <= 1 || count == 1) {
    for (long long i = begin; i < end; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(
      std::min<long long>(num_threads, count));
  std::vector<std::thread> pool;
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  const long long chunk = (count + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    long long lo = begin + t * chunk;
    long long hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (long long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace randset
