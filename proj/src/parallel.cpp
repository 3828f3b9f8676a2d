// SPDX-License-Identifier: Apache-2.0
#include "fene/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace fene {
namespace {

int default_threads() {
    if (const char* env = std::getenv("FENE_CLOSURE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

constexpr std::uint64_t kChunkBits = 24;
constexpr std::uint64_t kChunkMask = (std::uint64_t(1) << kChunkBits) - 1;

// Persistent pool. The dispatch ticket carries (job id | chunk index) so a
// worker that outlives its job can never claim a chunk of the next one.
class Pool {
  public:
    static Pool& instance() {
        static Pool pool;
        return pool;
    }

    void set_threads(int n) {
        std::lock_guard<std::mutex> run_lock(run_mutex_);
        stop_workers();
        threads_ = std::max(1, n);
        start_workers();
    }

    int threads() {
        std::lock_guard<std::mutex> run_lock(run_mutex_);
        return threads_;
    }

    void run(std::size_t nchunks, std::size_t grain, std::size_t n,
             const std::function<void(std::size_t, std::size_t)>& fn) {
        std::lock_guard<std::mutex> run_lock(run_mutex_);
        if (threads_ == 1 || nchunks == 1) {
            for (std::size_t c = 0; c < nchunks; ++c) fn(c * grain, std::min(n, (c + 1) * grain));
            return;
        }
        job_fn_ = &fn;
        job_n_ = n;
        job_grain_ = grain;
        pending_.store(static_cast<long>(nchunks), std::memory_order_relaxed);
        const std::uint64_t jid = ++job_id_;
        ticket_.store(jid << kChunkBits, std::memory_order_release);
        {
            std::lock_guard<std::mutex> lk(mutex_);
            ++generation_;
        }
        cv_.notify_all();
        work(jid);
        std::unique_lock<std::mutex> lk(done_mutex_);
        done_cv_.wait(lk, [&] { return pending_.load(std::memory_order_acquire) == 0; });
    }

  private:
    Pool() : threads_(default_threads()) { start_workers(); }

    ~Pool() {
        std::lock_guard<std::mutex> run_lock(run_mutex_);
        stop_workers();
    }

    void start_workers() {
        stopping_ = false;
        for (int i = 1; i < threads_; ++i) {
            workers_.emplace_back([this] { worker_loop(); });
        }
    }

    void stop_workers() {
        {
            std::lock_guard<std::mutex> lk(mutex_);
            stopping_ = true;
            ++generation_;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
        workers_.clear();
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            std::uint64_t jid;
            {
                std::unique_lock<std::mutex> lk(mutex_);
                cv_.wait(lk, [&] { return generation_ != seen; });
                seen = generation_;
                if (stopping_) return;
                jid = job_id_;
            }
            work(jid);
        }
    }

    void work(std::uint64_t jid) {
        const auto* fn = job_fn_;
        const std::size_t n = job_n_;
        const std::size_t grain = job_grain_;
        for (;;) {
            std::uint64_t v = ticket_.load(std::memory_order_acquire);
            std::size_t chunk;
            for (;;) {
                if ((v >> kChunkBits) != jid) return;
                chunk = static_cast<std::size_t>(v & kChunkMask);
                if (chunk * grain >= n) return;
                if (ticket_.compare_exchange_weak(v, v + 1, std::memory_order_acq_rel)) break;
            }
            const std::size_t begin = chunk * grain;
            (*fn)(begin, std::min(n, begin + grain));
            if (pending_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
                std::lock_guard<std::mutex> lk(done_mutex_);
                done_cv_.notify_all();
            }
        }
    }

    std::mutex run_mutex_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::mutex done_mutex_;
    std::condition_variable done_cv_;
    std::vector<std::thread> workers_;
    int threads_;
    bool stopping_ = false;
    std::uint64_t generation_ = 0;
    std::uint64_t job_id_ = 0;

    const std::function<void(std::size_t, std::size_t)>* job_fn_ = nullptr;
    std::size_t job_n_ = 0;
    std::size_t job_grain_ = 1;
    std::atomic<std::uint64_t> ticket_{0};
    std::atomic<long> pending_{0};
};

} // namespace

void set_num_threads(int n) { Pool::instance().set_threads(n); }

int num_threads() { return Pool::instance().threads(); }

void parallel_for_chunks(std::size_t n, std::size_t grain,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    grain = std::max<std::size_t>(1, grain);
    const std::size_t nchunks = (n + grain - 1) / grain;
    Pool::instance().run(nchunks, grain, n, fn);
}

namespace detail {

std::vector<double> pairwise_combine(std::vector<double>&& partials, std::size_t nblocks,
                                     std::size_t k) {
    if (nblocks == 0) return std::vector<double>(k, 0.0);
    std::size_t width = nblocks;
    while (width > 1) {
        const std::size_t half = width / 2;
        for (std::size_t b = 0; b < half; ++b) {
            for (std::size_t j = 0; j < k; ++j) {
                partials[b * k + j] += partials[(b + half) * k + j];
            }
        }
        if (width % 2 == 1) {
            for (std::size_t j = 0; j < k; ++j) partials[j] += partials[(width - 1) * k + j];
        }
        width = half;
    }
    partials.resize(k);
    return std::move(partials);
}

} // namespace detail
} // namespace fene
