#pragma once

// Index-based parallel map with deterministic collection: task i writes
// slot i, so results do not depend on the worker count.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace fdwave {

class WorkerPool {
 public:
  explicit WorkerPool(int workers = 1)
      : workers_(workers < 1 ? static_cast<int>(std::thread::hardware_concurrency()) : workers) {
    if (workers_ < 1) workers_ = 1;
  }

  int workers() const { return workers_; }

  template <typename T, typename Fn>
  std::vector<T> map(std::size_t n, Fn&& fn) const {
    std::vector<T> out(n);
    if (n == 0) return out;
    if (workers_ == 1 || n == 1) {
      for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
      return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    const std::size_t count = std::min<std::size_t>(workers_, n);
    threads.reserve(count);
    for (std::size_t t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return out;
  }

 private:
  int workers_;
};

}  // namespace fdwave
