#pragma once

// Deterministic data-parallel loop: work is split into fixed blocks indexed
// by block id, results land in preallocated slots, so the outcome does not
// depend on the thread count.

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace kltomo {

inline int effective_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Calls body(k) for k in [0, count) using the given number of threads.
// body must write only to its own slot k.
template <typename Body>
void parallel_for(long count, int threads, Body&& body) {
    threads = std::min<long>(effective_threads(threads), count);
    if (threads <= 1) {
        for (long k = 0; k < count; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            for (long k = w; k < count; k += threads) body(k);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace kltomo
