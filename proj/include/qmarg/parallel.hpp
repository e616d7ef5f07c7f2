#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace qmarg {

/// Number of worker threads to use when the caller passes 0.
inline unsigned defaultThreadCount() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Pairwise (tree) summation. The reduction order depends only on the
/// input length, never on thread count, so results are reproducible.
inline double pairwiseSum(std::span<const double> xs) {
    if (xs.size() <= 16) {
        double acc = 0.0;
        for (double v : xs) acc += v;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwiseSum(xs.first(half)) + pairwiseSum(xs.subspan(half));
}

/// Runs fn(begin, end) over disjoint index blocks on up to `threads`
/// workers. Blocks are fixed-size, so any per-block output layout is
/// independent of the actual parallelism.
inline void parallelForBlocks(std::size_t n, unsigned threads,
                              const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (threads == 0) threads = defaultThreadCount();
    const std::size_t blocks = std::min<std::size_t>(threads, n);
    if (blocks <= 1) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + blocks - 1) / blocks;
    std::vector<std::thread> pool;
    pool.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = b * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace qmarg
