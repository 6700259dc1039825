#pragma once

#include <cstddef>
#include <functional>

namespace eyeaffect {

/// Runs `body(i)` for i in [0, count) on up to `threads` worker threads
/// (0 = hardware concurrency). Each index runs exactly once; the first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace eyeaffect
