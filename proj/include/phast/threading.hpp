#pragma once

#include <cstddef>
#include <functional>

namespace phast {

// Worker count for sample-level parallelism. Respects PHAST_THREADS when set,
// otherwise hardware concurrency. Always >= 1.
int worker_count();

// Runs fn(i) for i in [0, n). Each index owns its output slot, so results are
// deterministic regardless of scheduling. Exceptions are rethrown on the
// calling thread (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace phast
