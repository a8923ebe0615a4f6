#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spikelab {

// Resolve a user-requested thread count: 0 means "use what the machine has".
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(begin, end) over [0, n) split into contiguous chunks. The split
// depends only on n and the resolved thread count is irrelevant to results:
// callers must make fn's effects a pure function of the index range (counter
// RNG + integer accumulation), so any thread layout yields identical output.
template <typename Fn>
void parallel_for_chunks(std::size_t n, int threads, Fn&& fn) {
    int t = resolve_threads(threads);
    if (t <= 1 || n < 4096) {
        fn(std::size_t{0}, n);
        return;
    }
    std::size_t nthreads = static_cast<std::size_t>(t);
    std::size_t chunk = (n + nthreads - 1) / nthreads;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t i = 0; i < nthreads; ++i) {
        std::size_t begin = i * chunk;
        if (begin >= n) break;
        std::size_t end = begin + chunk < n ? begin + chunk : n;
        pool.emplace_back([&fn, &first_error, &error_mutex, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace spikelab
