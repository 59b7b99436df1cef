// Deterministic parallel map over trial indices. Work is split into fixed
// chunks claimed by worker threads; per-trial results land in preassigned
// slots, so the outcome is independent of the number of workers.
#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace rmtlab {

inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class T, class Fn>
std::vector<T> parallel_map(std::int64_t n, Fn&& per_trial, int jobs = 0) {
  std::vector<T> out(static_cast<std::size_t>(n));
  const int workers = resolve_jobs(jobs);
  if (workers <= 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = per_trial(i);
    return out;
  }
  constexpr std::int64_t kChunk = 64;
  std::atomic<std::int64_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::int64_t begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      const std::int64_t end = std::min(begin + kChunk, n);
      for (std::int64_t i = begin; i < end; ++i)
        out[static_cast<std::size_t>(i)] = per_trial(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace rmtlab
