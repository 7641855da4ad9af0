#include "bipdo/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bipdo {

unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BIPDO_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

namespace {
thread_local bool in_worker = false;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t serial_below) {
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1 || n < serial_below || in_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      in_worker = true;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace bipdo
