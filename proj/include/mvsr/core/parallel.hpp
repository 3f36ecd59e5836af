// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

namespace mvsr {

// Number of worker threads for data-parallel kernels. Defaults to the
// hardware count, capped by the MVSR_THREADS environment variable.
int max_threads();
void set_max_threads(int n);

// Runs fn(begin, end) over fixed-size blocks of [0, n). Blocks are a function
// of n only, never of the thread count, and every block writes a disjoint
// output range, so results are bitwise identical for any thread setting.
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn,
                  int64_t grain = 1024);

}  // namespace mvsr
