#pragma once

#include <cstddef>
#include <functional>

namespace onoff {

/// Runs `body(i)` for i in [0, n) on up to `workers` threads (0 means the
/// hardware concurrency). Work items are claimed dynamically, so `body` must
/// only write to slots owned by `i`. If any item throws, the exception from the
/// lowest failing index is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

unsigned resolve_workers(unsigned requested);

}  // namespace onoff
