#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hessianlab {

// --workers / HESSIANLAB_WORKERS / hardware concurrency, in that order
inline int default_workers() {
  if (const char* env = std::getenv("HESSIANLAB_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

// Index-deterministic parallel map: fn(i) must depend only on i; results are
// merged in index order, so the output is identical at any worker count.
template <class T, class Fn>
std::vector<T> parallel_map(int count, int workers, Fn&& fn) {
  std::vector<T> out(count);
  if (workers <= 0) workers = default_workers();
  workers = std::min(workers, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < count; i += workers) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace hessianlab
