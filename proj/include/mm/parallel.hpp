#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace mm {

/// Evaluate fn(i) for i in [0, n) with per-index results collected in index
/// order. Every index derives its own seed upstream, so the thread count
/// never changes the outcome.
template <typename T, typename F>
std::vector<T> parallel_map(long n, int jobs, F&& fn) {
    std::vector<T> out(static_cast<std::size_t>(n > 0 ? n : 0));
    if (n <= 0) return out;
    if (jobs <= 1 || n == 1) {
        for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::atomic<long> next{0};
    auto worker = [&] {
        for (;;) {
            long i = next.fetch_add(1);
            if (i >= n) return;
            out[static_cast<std::size_t>(i)] = fn(i);
        }
    };
    unsigned hw = std::thread::hardware_concurrency();
    int actual = std::min<long>(jobs > 0 ? jobs : static_cast<int>(hw ? hw : 1), n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(actual));
    for (int t = 0; t < actual; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace mm
