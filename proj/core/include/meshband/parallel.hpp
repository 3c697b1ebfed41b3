#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace meshband {

/// Runs fn(0..n_jobs-1) on a bounded pool of n_threads workers. Jobs must be
/// independent and write only to their own output slots, which keeps results
/// identical to the sequential order. n_threads <= 1 runs inline.
inline void parallel_for(int n_jobs, int n_threads, const std::function<void(int)>& fn) {
    if (n_jobs <= 0) return;
    if (n_threads <= 1 || n_jobs == 1) {
        for (int i = 0; i < n_jobs; ++i) fn(i);
        return;
    }
    const int workers = std::min(n_threads, n_jobs);
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto body = [&]() {
        while (true) {
            const int job = next.fetch_add(1);
            if (job >= n_jobs || failed.load()) return;
            try {
                fn(job);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Hardware thread count with a sane fallback.
inline int default_thread_count() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace meshband
