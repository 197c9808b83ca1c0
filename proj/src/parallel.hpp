#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace pcy {

/// Process-wide worker count for embarrassingly parallel sweeps. Results
/// are always written into index-addressed slots, so the output does not
/// depend on this setting.
inline std::atomic<int>& worker_count() {
  static std::atomic<int> n{1};
  return n;
}

/// Runs body(i) for i in [0, n) over the configured workers with a static
/// block partition.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  int workers = worker_count().load();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(k);
  std::size_t chunk = (n + k - 1) / k;
  for (std::size_t w = 0; w < k; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pcy
