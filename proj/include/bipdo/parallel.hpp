#pragma once

#include <cstddef>
#include <functional>

namespace bipdo {

/// Worker count: hardware concurrency, capped by BIPDO_THREADS when set.
unsigned thread_count();

/// Runs body(i) for i in [0, n) over a static contiguous partition. Each index
/// is handled by exactly one thread, so per-index results do not depend on the
/// thread count. Runs serially when n < serial_below or when called from
/// inside another parallel_for.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t serial_below = 64);

}  // namespace bipdo
