#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mvsim::detail {

/// Fixed team of workers running parallel-for over task indices, one barrier per call.
/// With a single worker everything runs inline on the caller.
class WorkerTeam {
  public:
    explicit WorkerTeam(unsigned threads) {
        const unsigned extra = threads > 1 ? threads - 1 : 0;
        for (unsigned w = 0; w < extra; ++w) workers_.emplace_back([this] { loop(); });
    }

    ~WorkerTeam() {
        {
            std::lock_guard lock(mu_);
            stop_ = true;
            ++generation_;
        }
        cv_.notify_all();
        for (auto& t : workers_) t.join();
    }

    WorkerTeam(const WorkerTeam&) = delete;
    WorkerTeam& operator=(const WorkerTeam&) = delete;

    void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& fn) {
        if (workers_.empty() || n_tasks <= 1) {
            for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
            return;
        }
        {
            std::lock_guard lock(mu_);
            fn_ = &fn;
            n_tasks_ = n_tasks;
            next_.store(0);
            pending_ = workers_.size();
            error_ = nullptr;
            ++generation_;
        }
        cv_.notify_all();
        work();
        std::unique_lock lock(mu_);
        done_cv_.wait(lock, [&] { return pending_ == 0; });
        fn_ = nullptr;
        if (error_) std::rethrow_exception(error_);
    }

  private:
    void work() {
        for (;;) {
            const std::size_t i = next_.fetch_add(1);
            if (i >= n_tasks_) return;
            try {
                (*fn_)(i);
            } catch (...) {
                std::lock_guard lock(mu_);
                if (!error_) error_ = std::current_exception();
            }
        }
    }

    void loop() {
        std::size_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mu_);
                cv_.wait(lock, [&] { return generation_ != seen; });
                seen = generation_;
                if (stop_) return;
            }
            work();
            {
                std::lock_guard lock(mu_);
                --pending_;
            }
            done_cv_.notify_one();
        }
    }

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    const std::function<void(std::size_t)>* fn_ = nullptr;
    std::size_t n_tasks_ = 0;
    std::atomic<std::size_t> next_{0};
    std::size_t pending_ = 0;
    std::size_t generation_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

}  // namespace mvsim::detail
