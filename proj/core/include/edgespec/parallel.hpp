#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace edgespec {

/// Global worker count used by the scan loops (set from the CLI --threads).
int& worker_threads();

/// Chunked parallel loop over [0, n). Falls back to a serial loop when only
/// one worker is configured. The body must be safe to run concurrently for
/// distinct indices (all scan kernels here are pure per index).
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  const int workers = std::max(1, worker_threads());
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = std::min<std::size_t>(workers, n) - 1;
  pool.reserve(size_t(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace edgespec
