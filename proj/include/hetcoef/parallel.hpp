#ifndef HETCOEF_PARALLEL_HPP_
#define HETCOEF_PARALLEL_HPP_

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace hetcoef {

// Runs fn(0..total-1) on up to `threads` workers. Callers keep results in
// per-index slots so the reduction is independent of completion order.
inline void parallel_for(int total, int threads,
                         const std::function<void(int)>& fn) {
  if (threads <= 1 || total <= 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= total) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(threads, total);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

}  // namespace hetcoef

#endif  // HETCOEF_PARALLEL_HPP_
