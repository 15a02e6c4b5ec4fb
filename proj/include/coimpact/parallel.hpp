#pragma once

#include <cstddef>
#include <functional>

namespace coimpact {

/// Worker count from COIMPACT_THREADS; 0, unset or invalid means
/// std::thread::hardware_concurrency().
unsigned worker_count();

/// Runs task(i) for i in [0, count) on up to worker_count() threads.
/// Tasks must write only to their own output slot; the first exception thrown
/// by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace coimpact
