#pragma once

#include <functional>

namespace kpzlab {

/// Worker count: KPZLAB_THREADS if set and positive, else hardware concurrency.
int replica_threads();
/// Runs fn(0) ... fn(n - 1) on up to replica_threads() workers. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace kpzlab
