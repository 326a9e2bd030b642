#include "finrec/thread_pool.hpp"

namespace finrec {

  ThreadPool::ThreadPool(std::size_t threads) {
    for (std::size_t i = 1; i < threads; ++i) workers_.emplace_back([this] { work(); });
  }

  ThreadPool::~ThreadPool() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& w : workers_) w.join();
  }

  void ThreadPool::drain() {
    std::unique_lock lock(mutex_);
    while (next_ < count_) {
      std::size_t i = next_++;
      lock.unlock();
      try {
        (*body_)(i);
      } catch (...) {
        lock.lock();
        if (!error_) error_ = std::current_exception();
        next_ = count_;
        continue;
      }
      lock.lock();
    }
  }

  void ThreadPool::work() {
    std::size_t seen = 0;
    for (;;) {
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        ++running_;
      }
      drain();
      {
        std::lock_guard lock(mutex_);
        --running_;
      }
      finished_.notify_all();
    }
  }

  void ThreadPool::parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (workers_.empty() || count < 2) {
      for (std::size_t i = 0; i < count; ++i) body(i);
      return;
    }
    {
      std::lock_guard lock(mutex_);
      body_ = &body;
      count_ = count;
      next_ = 0;
      error_ = nullptr;
      ++generation_;
    }
    wake_.notify_all();
    drain();
    std::unique_lock lock(mutex_);
    finished_.wait(lock, [&] { return running_ == 0 && next_ >= count_; });
    body_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

}
