#pragma once

#include <cstddef>
#include <functional>

namespace xferlab {

/// Resolves the worker count: XFERLAB_THREADS env var wins, then the
/// configured value, then hardware concurrency (0 means "not set").
size_t thread_count(size_t configured);

/// Runs fn(0..n-1) across workers. Work items must be independent; each
/// writes only into its own slot, so results cannot depend on scheduling.
void parallel_for(size_t n, size_t threads, const std::function<void(size_t)>& fn);

}  // namespace xferlab
