#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace swarmcov {

inline unsigned default_thread_count() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Runs body(i, worker) for i in [0, n), worker in [0, workers). Tasks are
// claimed from a shared counter, so long and short tasks balance; each task
// must be internally deterministic and write only to its own output slot,
// which keeps results independent of scheduling. The worker index lets
// callers hand each thread its own scratch state. The first exception thrown
// by any task is rethrown.
template <typename Body>
void parallel_for_workers(std::size_t n, unsigned threads, Body&& body) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i, 0u);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto run = [&](unsigned worker) {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load(std::memory_order_relaxed)) return;
            try {
                body(i, worker);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run, t);
    run(0);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    parallel_for_workers(n, threads, [&](std::size_t i, unsigned) { body(i); });
}

} // namespace swarmcov
