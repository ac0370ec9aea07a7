#pragma once

#include <algorithm>
#include <cstdlib>
#include <cstdint>
#include <thread>
#include <vector>

namespace aniso_heat {

/// Worker count: hardware concurrency capped by ANISO_HEAT_THREADS.
inline int thread_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("ANISO_HEAT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

/// Chunked parallel loop over [0, count). Chunk boundaries depend only on
/// count, so per-chunk work (and any caller-side per-chunk reduction done in
/// chunk order) is independent of the number of workers.
template <typename Fn>
void parallel_for(std::int64_t count, Fn&& fn) {
    const int workers = thread_count();
    if (count <= 0) return;
    if (workers <= 1 || count < 1024) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::int64_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min<std::int64_t>(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Deterministic sum: fixed-size block partial sums combined in index order,
/// so the result does not depend on the worker count.
inline double deterministic_sum(const std::vector<double>& partials) {
    double acc = 0.0;
    for (double v : partials) acc += v;
    return acc;
}

} // namespace aniso_heat
