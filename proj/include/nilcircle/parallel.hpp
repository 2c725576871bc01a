#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace nilcircle {

// Worker count: NILCIRCLE_THREADS caps it, default = hardware concurrency.
inline int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw ? static_cast<int>(hw) : 1;
    if (const char* env = std::getenv("NILCIRCLE_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

// Runs fn(i) for i in [0, n).  Work is split into fixed chunks claimed by an
// atomic counter, so results written to disjoint slots are identical for any
// thread count.
inline void parallel_for(long long n, const std::function<void(long long)>& fn) {
    if (n <= 0) return;
    int workers = worker_count();
    if (workers <= 1 || n == 1) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    const long long chunk = std::max<long long>(1, n / (workers * 8));
    std::atomic<long long> next{0};
    auto run = [&]() {
        for (;;) {
            long long lo = next.fetch_add(chunk);
            if (lo >= n) break;
            long long hi = std::min(n, lo + chunk);
            for (long long i = lo; i < hi; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

// Deterministic reduction: partial results are computed per fixed-size chunk
// and combined in chunk order, independent of how threads interleave.
template <typename T, typename Map, typename Combine>
T chunked_reduce(long long n, T init, Map map, Combine combine, long long chunks = 64) {
    if (n <= 0) return init;
    chunks = std::min(chunks, n);
    std::vector<T> partial(static_cast<size_t>(chunks), init);
    parallel_for(chunks, [&](long long c) {
        long long lo = n * c / chunks, hi = n * (c + 1) / chunks;
        T acc = init;
        for (long long i = lo; i < hi; ++i) acc = combine(acc, map(i));
        partial[static_cast<size_t>(c)] = acc;
    });
    T total = init;
    for (const T& p : partial) total = combine(total, p);
    return total;
}

} // namespace nilcircle
