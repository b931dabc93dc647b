#include "lpdo_harness/pool.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lpdo::harness {

std::size_t worker_count(std::size_t n_cells, int requested) {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (requested > 0) {
    cap = static_cast<std::size_t>(requested);
  } else if (const char* env = std::getenv("LPDO_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) cap = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // unparsable values are ignored
    }
  }
  return std::max<std::size_t>(1, std::min(cap, n_cells));
}

void run_cells(std::size_t n_cells, std::size_t workers,
               const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_cell = n_cells;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t c = next++; c < n_cells; c = next++) {
      try {
        fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (c < failed_cell) {
          failed_cell = c;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lpdo::harness
