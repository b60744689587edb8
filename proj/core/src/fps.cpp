#include "trackfuse/fps.hpp"

#include <atomic>
#include <limits>
#include <thread>

#include "trackfuse/errors.hpp"

namespace trackfuse {

namespace {

struct ChunkBest {
    double d2 = -std::numeric_limits<double>::infinity();
    int index = -1;
};

// One fused pass over [begin,end): fold the distance to `last` into min_d2
// and report the chunk argmax. Selected points carry min_d2 = -1 and can
// never win. min() keeps them at -1 since real distances are >= 0.
ChunkBest scan_chunk(const double* px, const double* py, const double* pz, double* min_d2,
                     int begin, int end, int last) {
    const double lx = px[last], ly = py[last], lz = pz[last];
    ChunkBest best;
    for (int i = begin; i < end; ++i) {
        const double dx = px[i] - lx, dy = py[i] - ly, dz = pz[i] - lz;
        const double cand = dx * dx + dy * dy + dz * dz;
        const double d2 = cand < min_d2[i] ? cand : min_d2[i];
        min_d2[i] = d2;
        if (d2 > best.d2) { // first max wins; chunks are scanned ascending
            best.d2 = d2;
            best.index = i;
        }
    }
    return best;
}

} // namespace

std::vector<int> fps_indices(const std::vector<Vec3>& points, int target_count, int seed_index) {
    const int n = static_cast<int>(points.size());
    if (target_count <= 0) throw InvalidInput("fps: target_count must be positive");
    if (target_count > n) throw InvalidInput("fps: target_count exceeds point count");
    if (seed_index < 0 || seed_index >= n) throw InvalidInput("fps: seed_index out of range");

    // SoA copies keep the hot scan vectorizable
    std::vector<double> px(n), py(n), pz(n), min_d2(n, std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i) {
        px[i] = points[i].x();
        py[i] = points[i].y();
        pz[i] = points[i].z();
    }

    std::vector<int> selected;
    selected.reserve(target_count);
    selected.push_back(seed_index);
    min_d2[seed_index] = -1; // selected sentinel
    int last = seed_index;

    const long long work = static_cast<long long>(n) * (target_count - 1);
    unsigned hardware = std::thread::hardware_concurrency();
    if (hardware == 0) hardware = 4;
    const bool parallel = work > 8'000'000 && hardware > 1;

    if (!parallel) {
        for (int s = 1; s < target_count; ++s) {
            const ChunkBest best = scan_chunk(px.data(), py.data(), pz.data(), min_d2.data(), 0, n, last);
            selected.push_back(best.index);
            min_d2[best.index] = -1;
            last = best.index;
        }
        return selected;
    }

    // Fixed chunk boundaries and an ordered combine make the result
    // identical for any worker count.
    const int num_chunks = 64;
    const int chunk_len = (n + num_chunks - 1) / num_chunks;
    const int workers = static_cast<int>(std::min<unsigned>(hardware, num_chunks));

    std::vector<ChunkBest> chunk_best(num_chunks);
    std::atomic<int> round{0};
    std::atomic<int> cursor{0};
    std::atomic<int> done{0};
    std::atomic<bool> quit{false};
    std::atomic<int> shared_last{last};

    auto work_round = [&]() {
        const int my_last = shared_last.load(std::memory_order_acquire);
        int c;
        while ((c = cursor.fetch_add(1, std::memory_order_relaxed)) < num_chunks) {
            const int begin = c * chunk_len;
            const int end = std::min(begin + chunk_len, n);
            if (begin < end)
                chunk_best[c] =
                    scan_chunk(px.data(), py.data(), pz.data(), min_d2.data(), begin, end, my_last);
            else
                chunk_best[c] = {};
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 0; w < workers - 1; ++w) {
        pool.emplace_back([&] {
            int seen = 0;
            for (;;) {
                while (round.load(std::memory_order_acquire) == seen && !quit.load(std::memory_order_acquire))
                    std::this_thread::yield();
                if (quit.load(std::memory_order_acquire)) return;
                seen = round.load(std::memory_order_acquire);
                work_round();
                done.fetch_add(1, std::memory_order_release);
            }
        });
    }

    for (int s = 1; s < target_count; ++s) {
        cursor.store(0, std::memory_order_relaxed);
        done.store(0, std::memory_order_relaxed);
        shared_last.store(last, std::memory_order_release);
        round.fetch_add(1, std::memory_order_release);
        work_round(); // main thread participates
        while (done.load(std::memory_order_acquire) < workers - 1) std::this_thread::yield();

        ChunkBest best;
        for (const ChunkBest& cb : chunk_best) {
            if (cb.d2 > best.d2) best = cb; // ascending chunks keep lowest-index ties
        }
        selected.push_back(best.index);
        min_d2[best.index] = -1;
        last = best.index;
    }
    quit.store(true, std::memory_order_release);
    for (auto& t : pool) t.join();
    return selected;
}

std::vector<int> fps(const ColoredPointCloud& cloud, int target_count, int seed_index) {
    return fps_indices(cloud.positions, target_count, seed_index);
}

} // namespace trackfuse
