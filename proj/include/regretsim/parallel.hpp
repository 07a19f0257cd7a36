#ifndef REGRETSIM_PARALLEL_HPP
#define REGRETSIM_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace regretsim {

// Runs body(i) for i in [0, count) on up to n_workers threads
// (0 = hardware concurrency). Work items are independent; callers must
// write results into per-index slots and reduce in index order so the
// outcome does not depend on the worker count. The first exception
// thrown by any worker is rethrown after all workers join.
inline void parallel_for_indices(int count, int n_workers,
                                 const std::function<void(int)>& body) {
  if (count <= 0) return;
  int workers = n_workers > 0 ? n_workers
                              : int(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers > count) workers = count;

  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace regretsim

#endif  // REGRETSIM_PARALLEL_HPP
