#pragma once

#include <cstddef>
#include <functional>

namespace deltakit {

// Environment variable consulted when no explicit thread count is given.
inline constexpr const char* kThreadsEnvVar = "DELTAKIT_THREADS";

// 0 means "auto": DELTAKIT_THREADS if set and positive, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

// Runs task(i) for every i in [0, count) on up to `threads` workers. Tasks are
// claimed dynamically; callers must write results into per-index slots so the
// outcome does not depend on scheduling. The first exception thrown by any
// task is rethrown on the calling thread after all workers have joined.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& task);

}  // namespace deltakit
