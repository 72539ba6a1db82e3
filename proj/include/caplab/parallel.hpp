#pragma once
// Tiny index-parallel helper. Work item i writes only into slot i of a
// preallocated output, so parallel and serial runs produce identical results.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace caplab {

inline unsigned clamp_threads(unsigned requested) {
  const unsigned hw = std::thread::hardware_concurrency();
  if (requested == 0) requested = 1;
  if (hw != 0 && requested > hw) requested = hw;
  return requested;
}

/// Run fn(i) for i in [0, count) on `threads` workers (static block split).
/// The first exception thrown by any worker is rethrown on the caller.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  threads = clamp_threads(threads);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  if (threads > count) threads = static_cast<unsigned>(count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::mutex err_mutex;
  std::exception_ptr first_error;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = static_cast<std::size_t>(t) * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace caplab
