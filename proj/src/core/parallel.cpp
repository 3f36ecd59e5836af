// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mvsr {

namespace {

int initial_threads() {
  int n = (int)std::thread::hardware_concurrency();
  if (n < 1) n = 1;
  if (const char* env = std::getenv("MVSR_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

std::atomic<int> g_threads{initial_threads()};

}  // namespace

int max_threads() { return g_threads.load(); }
void set_max_threads(int n) { g_threads.store(std::max(1, n)); }

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn, int64_t grain) {
  if (n <= 0) return;
  const int threads = max_threads();
  if (threads == 1 || n <= grain) {
    fn(0, n);
    return;
  }
  // Block layout depends only on n and grain, so any thread count yields the
  // same per-block work and bitwise-identical output.
  const int64_t blocks = (n + grain - 1) / grain;
  std::atomic<int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const int64_t b = next.fetch_add(1);
      if (b >= blocks) return;
      fn(b * grain, std::min(n, (b + 1) * grain));
    }
  };
  std::vector<std::thread> pool;
  const int spawn = (int)std::min<int64_t>(threads - 1, blocks - 1);
  pool.reserve((size_t)spawn);
  for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace mvsr
