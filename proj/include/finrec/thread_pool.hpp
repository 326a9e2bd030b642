#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace finrec {

  /// Fixed set of workers running index-parallel loops.
  class ThreadPool {
  public:
    explicit ThreadPool(std::size_t threads);
    ~ThreadPool();
    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    std::size_t size() const { return workers_.size() + 1; }
    /// Runs body(i) for i in [0, count); the calling thread takes part.
    void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

  private:
    void work();
    void drain();

    std::vector<std::thread> workers_;
    std::mutex mutex_;
    std::condition_variable wake_, finished_;
    const std::function<void(std::size_t)>* body_ = nullptr;
    std::size_t count_ = 0, next_ = 0, running_ = 0;
    std::size_t generation_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
  };

}
