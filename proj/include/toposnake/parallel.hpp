#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace toposnake {

/// Data-parallel width. TOPOSNAKE_THREADS caps it; otherwise hardware concurrency.
inline unsigned thread_count() {
  static const unsigned count = [] {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TOPOSNAKE_THREADS")) {
      try {
        const long v = std::stol(env);
        if (v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
      } catch (...) {
      }
    }
    return hw;
  }();
  return count;
}

/// Runs body(i) for i in [0, rows). Each row is written by exactly one worker,
/// so results do not depend on the thread count.
template <class Body>
void parallel_rows(std::size_t rows, Body&& body) {
  const unsigned workers = thread_count();
  // Small grids are not worth the thread start-up.
  if (workers <= 1 || rows < 64) {
    for (std::size_t i = 0; i < rows; ++i) body(i);
    return;
  }
  const std::size_t chunk = (rows + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(rows, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
}

}  // namespace toposnake
