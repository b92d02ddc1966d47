#pragma once

#include <cstddef>
#include <functional>

// Tiny index-space thread pool helper. Work items write to preallocated
// slots, so output bytes never depend on the thread count.

namespace enslsr {

// Process-wide worker count: defaults to ENS_LSR_THREADS if set, else the
// hardware concurrency.
int thread_count();
void set_thread_count(int n);

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace enslsr
