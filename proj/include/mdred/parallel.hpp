#pragma once

#include <thread>
#include <vector>

namespace mdred {

// Static block partition of [0, n) over n_threads workers. Each item writes
// only its own keyed slot, so results are identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn&& fn) {
    if (n == 0) return;
    if (n_threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace mdred
