#pragma once

#include <cstddef>
#include <functional>

namespace mixsing {

/// Worker count: MIXSING_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Runs body(i) for i in [begin, end) over static contiguous chunks. Each index
/// is processed exactly once, so results written per index are independent of
/// the thread count.
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body);

}  // namespace mixsing
