#include "qtazrp/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace qtazrp {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
  int n = g_max_threads.load();
  if (n == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    n = hw == 0 ? 1 : static_cast<int>(hw);
    if (n > 16) n = 16;
  }
  return n;
}

void parallel_for(long count, const std::function<void(long)>& fn) {
  const int workers = max_threads();
  if (count <= 0) return;
  if (workers <= 1 || count == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  const int used = static_cast<int>(std::min<long>(workers, count));
  std::atomic<long> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used));
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (int w = 0; w < used; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = cursor.fetch_add(1);
        if (i >= count || failed.load()) break;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          break;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace qtazrp
