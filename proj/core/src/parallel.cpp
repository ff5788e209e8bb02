#include "oscimark/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oscimark {

void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn) {
  if (n_tasks <= 0) return;
  if (workers <= 1 || n_tasks == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  const int n_threads = std::min(workers, n_tasks);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= n_tasks) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> threads;
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace oscimark
