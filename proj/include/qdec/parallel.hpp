#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace qdec {

/// Runs f(i) for i in [0, n) across `workers` threads. Each index writes only
/// its own output slot, so results are identical for any worker count; any
/// reduction over the outputs must then happen in index order.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      f(i);
    }
  };
  std::size_t nt = static_cast<std::size_t>(workers) < n ? static_cast<std::size_t>(workers) : n;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
}

}  // namespace qdec
