#include "gapped1d/common.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace gapped1d {

int worker_count() {
  static const int cached = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("GAPPED1D_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && v >= 1 && v <= 1024) return static_cast<int>(v);
    }
    return hw;
  }();
  return cached;
}

void parallel_for(long long count, const std::function<void(long long)>& fn) {
  if (count <= 0) return;
  int workers = worker_count();
  if (workers <= 1 || count == 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  if (workers > count) workers = static_cast<int>(count);
  std::atomic<long long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        long long i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("parallel_for: worker threw");
}

}  // namespace gapped1d
