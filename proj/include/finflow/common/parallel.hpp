#pragma once

#include <cstddef>
#include <functional>

namespace finflow {

/// Worker count: FINFLOW_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks; callers
/// must write results by index so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace finflow
