#pragma once

#include <cstddef>
#include <functional>

namespace radpair {

// Worker count: RADPAIR_THREADS when set (clamped to >= 1), else hardware
// concurrency.
int worker_thread_count();

// Runs fn(i) for i in [0, n) across the worker pool. Tasks must write only to
// disjoint slots; indices are handed out dynamically, so outputs must not
// depend on execution order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace radpair
