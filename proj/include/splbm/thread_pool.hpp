#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace splbm {

/// Persistent worker pool running contiguous index ranges. parallel_for
/// blocks until every worker finished, which is the per-step barrier of the
/// tile schedule. A pool of size 1 runs inline.
class ThreadPool {
 public:
  explicit ThreadPool(int threads) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    size_ = threads;
    if (size_ == 1) return;
    workers_.reserve(static_cast<std::size_t>(size_));
    for (int w = 0; w < size_; ++w) {
      workers_.emplace_back([this, w] { worker_loop(w); });
    }
  }

  ~ThreadPool() {
    if (size_ == 1) return;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      stop_ = true;
      ++generation_;
    }
    start_cv_.notify_all();
    for (auto& t : workers_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return size_; }

  /// Runs fn(begin, end, worker) over a partition of [0, n).
  void parallel_for(std::size_t n,
                    const std::function<void(std::size_t, std::size_t, int)>& fn) {
    if (n == 0) return;
    if (size_ == 1) {
      fn(0, n, 0);
      return;
    }
    {
      std::unique_lock<std::mutex> lock(mutex_);
      task_ = &fn;
      count_ = n;
      pending_ = size_;
      ++generation_;
    }
    start_cv_.notify_all();
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    task_ = nullptr;
  }

 private:
  void worker_loop(int worker) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(std::size_t, std::size_t, int)>* task;
      std::size_t n;
      {
        std::unique_lock<std::mutex> lock(mutex_);
        start_cv_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
        task = task_;
        n = count_;
      }
      const std::size_t chunk = (n + static_cast<std::size_t>(size_) - 1) / size_;
      const std::size_t begin = std::min(n, chunk * static_cast<std::size_t>(worker));
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end) (*task)(begin, end, worker);
      {
        std::unique_lock<std::mutex> lock(mutex_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  int size_ = 1;
  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t, std::size_t, int)>* task_ = nullptr;
  std::size_t count_ = 0;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace splbm
