#pragma once

#include <functional>

namespace qcurv {

// Worker count: explicit value if positive, else QCURV_THREADS, else hardware concurrency.
int thread_count(int requested = 0);

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any body is rethrown after all workers join.
void parallel_for(int count, const std::function<void(int)>& body, int threads = 0);

}  // namespace qcurv
