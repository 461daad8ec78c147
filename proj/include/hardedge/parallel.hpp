#pragma once

#include <cstddef>
#include <functional>

namespace hardedge {

/// HARDNESS_THREADS if set to a positive integer, else the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(0..count-1) on worker_count() threads. Work items must write only their own
/// outputs. If any item throws, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hardedge
