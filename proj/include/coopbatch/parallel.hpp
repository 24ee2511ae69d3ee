#pragma once

#include <cstddef>
#include <functional>

namespace coopbatch {

/// Worker cap: COOPBATCH_THREADS env var, 0 or unset = hardware concurrency.
std::size_t max_workers();

/// Run fn(0..n-1) across up to max_workers() threads in static contiguous
/// chunks. fn must only write to per-index slots; results are then identical
/// whether this runs on one thread or many.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace coopbatch
