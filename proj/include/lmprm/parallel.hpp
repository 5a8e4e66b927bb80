#pragma once

#include <cstddef>
#include <functional>

namespace lmprm {

// Worker count used when a caller passes 0: LMPRM_THREADS if set, else the
// hardware concurrency (at least 1).
unsigned default_threads();

// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
// Indices are handed out dynamically; body must only write state owned by i.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace lmprm
