#pragma once

#include <cstddef>
#include <functional>

namespace sppqm {

// Worker count: hardware concurrency, capped by SPPQM_THREADS when set.
std::size_t worker_count();

// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index
// is visited exactly once; callers write results into slot i, so output order
// never depends on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sppqm
