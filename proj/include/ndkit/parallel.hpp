#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ndkit {

/// Runs fn(i) for i in [0, n) over `workers` threads in contiguous chunks.
/// Callers write results into per-index slots and reduce afterwards, so the
/// outcome never depends on the worker count.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t w = std::min<std::size_t>(workers, n);
    const std::size_t chunk = (n + w - 1) / w;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace ndkit
