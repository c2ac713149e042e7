#pragma once

#include <cstddef>
#include <functional>

namespace elicit {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must
/// be independent; callers get determinism by writing results into
/// preallocated per-index slots. threads <= 1 runs inline.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Resolves a thread-count request: explicit positive values win, 0 means
/// "use the ELICIT_THREADS environment variable, else 1".
int resolve_threads(int requested);

}  // namespace elicit
