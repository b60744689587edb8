#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace trackfuse {

/// Runs fn(begin, end) over fixed index chunks. Chunk boundaries depend only
/// on n, so floating-point results are identical for any worker count as long
/// as per-chunk work is independent.
inline void parallel_for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                                std::size_t num_chunks = 64) {
    if (n == 0) return;
    if (num_chunks > n) num_chunks = n;
    std::size_t workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 4;
    if (workers > num_chunks) workers = num_chunks;

    if (workers <= 1) {
        fn(0, n);
        return;
    }

    const std::size_t chunk = (n + num_chunks - 1) / num_chunks;
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s < n; s += chunk) starts.push_back(s);

    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= starts.size()) return;
                const std::size_t begin = starts[i];
                const std::size_t end = std::min(begin + chunk, n);
                fn(begin, end);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace trackfuse
