#ifndef ROBORD_PARALLEL_HPP
#define ROBORD_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace robord {

/// Worker count: ROBORD_THREADS if set, else hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("ROBORD_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs task(0..count-1), possibly concurrently. Each task must write only
/// to its own output slot; callers combine slots in index order afterwards,
/// so results never depend on scheduling. The first exception thrown by a
/// task is rethrown after all workers finish.
inline void run_indexed_tasks(std::size_t count,
                              const std::function<void(std::size_t)>& task,
                              int threads = thread_budget()) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int n_workers =
      static_cast<int>(std::min<std::size_t>(count, threads));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace robord

#endif  // ROBORD_PARALLEL_HPP
