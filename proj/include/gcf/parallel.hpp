#pragma once

#include <cstddef>
#include <functional>

namespace gcf {

/// Process-wide worker count used by parallel_for. 0 means "hardware
/// concurrency". Outputs never depend on this value: parallel regions write
/// disjoint index ranges and all reductions run in fixed sequential order.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(i) for i in [0, n). Splits into contiguous blocks, one thread per
/// block; falls back to a plain loop for small n or a single worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace gcf
