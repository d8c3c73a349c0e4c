#pragma once

#include <cstddef>
#include <functional>

namespace genmetrics {

/// Worker count used by parallel loops. Reads GENMETRICS_THREADS once; 0 or
/// unset means std::thread::hardware_concurrency().
std::size_t thread_count();

/// Overrides the worker count for the rest of the process (0 restores auto).
void set_thread_count(std::size_t threads);

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks never share
/// an index, so a body that writes only to slots of its own range produces
/// the same result for every worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 16);

}  // namespace genmetrics
