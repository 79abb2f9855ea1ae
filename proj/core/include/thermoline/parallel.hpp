#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace thermoline::par {

// Thread count resolution: explicit request > THERMOLINE_THREADS > hardware.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("THERMOLINE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, count) on up to n_threads threads. Work is split
// into contiguous index blocks; callers write results into per-index slots
// and reduce afterwards in index order, which keeps every aggregate
// independent of the thread schedule.
template <typename Fn>
void parallel_for(std::size_t count, int n_threads, Fn&& fn) {
    n_threads = std::min<std::size_t>(resolve_threads(n_threads), count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    const std::size_t chunk = (count + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace thermoline::par
