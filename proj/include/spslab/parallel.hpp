#pragma once

#include <functional>

namespace spslab {

// Worker count used when a caller passes 0: SPSLAB_THREADS, else the hardware concurrency.
int default_threads();

// Runs fn(i) for every i in [0, n) on up to `threads` workers. Iterations must be
// independent and write only their own slots; the first exception is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

}  // namespace spslab
