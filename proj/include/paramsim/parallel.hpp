// Minimal work-queue pool for independent sweep points. Results must be
// written into per-index slots by the callable; worker count therefore never
// affects the numbers, only wall time.
#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace paramsim {

template <typename Fn>
void parallel_indexed(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(workers, static_cast<int>(n));
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace paramsim
