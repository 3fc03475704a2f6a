#pragma once

#include <functional>

namespace stldro::util {

/// Number of worker threads: STLDRO_WORKERS env var if set, else `fallback`
/// (clamped to hardware concurrency).
int worker_count(int fallback = 0);

/// Runs body(i) for i in [0, n). Work is split statically across `workers`
/// threads; results must be written to per-index slots so the outcome does
/// not depend on the thread count.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

}  // namespace stldro::util
