#include "stldro/util/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace stldro::util {

int worker_count(int fallback) {
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STLDRO_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 4 * hw);
  }
  if (fallback >= 1) return std::min(fallback, hw);
  return hw;
}

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace stldro::util
