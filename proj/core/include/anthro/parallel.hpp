#pragma once

#include <cstddef>
#include <functional>

namespace anthro {

/// Resolves a requested thread count: 0 means "ANTHROKIT_THREADS, else
/// hardware concurrency".
std::size_t resolve_threads(std::size_t requested);

/// Runs body(i) for i in [0, n) on up to `threads` threads. Work is split in
/// contiguous chunks; callers write results into index-addressed storage so
/// the outcome is independent of the thread count. The first exception thrown
/// by any body is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace anthro
