#pragma once

#include <cstddef>
#include <functional>

namespace fedsim {

/// Thread cap from SIM_THREADS (default: hardware concurrency, min 1).
std::size_t max_threads();

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks across at
/// most max_threads() threads; callers must write results into per-index
/// slots and aggregate afterwards in fixed order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fedsim
