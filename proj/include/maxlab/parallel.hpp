#pragma once

#include <cstddef>
#include <functional>

namespace maxlab {

/// Worker count used by parallel_for. Initialized from MAXLAB_THREADS
/// (0 or unset = hardware concurrency).
int max_threads();
void set_max_threads(int n);

/// Runs fn(i) for i in [0, count). Work is split across max_threads()
/// workers; calls made from inside a worker run serially. Callers write
/// results into per-index slots so output order never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace maxlab
