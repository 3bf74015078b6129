#pragma once

#include <cstddef>
#include <functional>

namespace halfline {

// Worker count: HALFLINE_WEYL_THREADS when set (clamped to [1, 256]),
// otherwise the hardware concurrency.
int worker_count();

// Runs fn(0..n-1) across workers. Callers keep determinism by writing results
// into index i of a pre-sized container; the first exception is rethrown on
// the calling thread after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace halfline
