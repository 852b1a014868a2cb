#ifndef SYL_PARALLEL_HPP
#define SYL_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace syl {

// worker cap: SYL_THREADS when set, otherwise hardware parallelism
inline unsigned worker_count() {
  if (const char* env = std::getenv("SYL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// index-sharded parallel loop; results must be written to index-addressed
// slots so the outcome is deterministic regardless of scheduling
inline void parallel_for(size_t n, const std::function<void(size_t)>& body) {
  const unsigned workers = std::min<size_t>(worker_count(), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace syl

#endif
