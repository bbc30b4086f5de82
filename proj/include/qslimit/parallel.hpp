#pragma once

#include <cstddef>
#include <functional>

namespace qsl {

/// Worker count: QSLIMIT_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Calls body(i) for i in [0, n), split into contiguous blocks over
/// thread_count() threads. Each index is processed exactly once and writes
/// only its own outputs, so results do not depend on the number of threads.
/// The first exception thrown by any block is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qsl
