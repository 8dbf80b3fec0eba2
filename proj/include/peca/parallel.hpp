#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace peca {

/// Number of workers to use when the caller passes 0.
inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls body(i) for i in [0, n) on up to `workers` threads using contiguous
/// chunks. body must only write to per-index state; results are then
/// independent of the worker count. The first exception thrown by any
/// worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    if (workers == 0) workers = default_workers();
    const std::size_t n_threads = std::min<std::size_t>(workers, n);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (std::size_t w = 0; w < n_threads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace peca
