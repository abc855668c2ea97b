#pragma once

#include <cstddef>
#include <functional>

namespace fakesat {

/// Worker count: FAKESAT_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
unsigned worker_count();

/// Runs fn(0..n-1) across worker_count() threads. Each index runs exactly once; if any
/// call throws, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace fakesat
