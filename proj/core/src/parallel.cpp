#include "smoothnet/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace smoothnet {

namespace {
std::atomic<std::size_t> g_max_threads{0};

std::size_t hardware_threads() {
  std::size_t n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}
}  // namespace

void set_max_threads(std::size_t n) { g_max_threads.store(n); }

std::size_t max_threads() {
  std::size_t n = g_max_threads.load();
  return n == 0 ? hardware_threads() : n;
}

namespace detail {

void run_chunks(std::size_t n, std::size_t grain,
                void (*trampoline)(void*, std::size_t, std::size_t), void* ctx) {
  if (n == 0) return;
  if (grain == 0) grain = 1;
  const std::size_t n_chunks = (n + grain - 1) / grain;
  const std::size_t n_threads = std::min(max_threads(), n_chunks);
  if (n_threads <= 1) {
    trampoline(ctx, 0, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      const std::size_t begin = c * grain;
      const std::size_t end = std::min(begin + grain, n);
      trampoline(ctx, begin, end);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads - 1);
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace detail
}  // namespace smoothnet
