#include "trackfuse/sor.hpp"

#include <cmath>

#include "trackfuse/errors.hpp"
#include "trackfuse/kdtree.hpp"
#include "trackfuse/parallel.hpp"

namespace trackfuse {

SorResult sor_filter(const ColoredPointCloud& cloud, const SorParams& params) {
    if (params.n_neighbors < 1) throw InvalidInput("sor: n_neighbors must be >= 1");
    if (params.k_sigma <= 0) throw InvalidInput("sor: k_sigma must be positive");
    const int n = static_cast<int>(cloud.size());
    if (n <= params.n_neighbors)
        throw InvalidInput("sor: cloud must have more than n_neighbors points");

    const KdTree tree(cloud.positions);
    const int k = params.n_neighbors;

    std::vector<char> remove(n, 0);

    if (params.mode == SorMode::classic) {
        std::vector<double> mean_dist(n);
        parallel_for_chunks(n, [&](std::size_t begin, std::size_t end) {
            std::vector<int> idx;
            std::vector<double> dist;
            for (std::size_t i = begin; i < end; ++i) {
                tree.knn(cloud.positions[i], k + 1, idx, dist); // self included at distance 0
                double sum = 0;
                int counted = 0;
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    if (idx[j] == static_cast<int>(i)) continue;
                    sum += dist[j];
                    if (++counted == k) break;
                }
                mean_dist[i] = sum / k;
            }
        });

        double mu = 0;
        for (double d : mean_dist) mu += d;
        mu /= n;
        double var = 0;
        for (double d : mean_dist) var += (d - mu) * (d - mu);
        var /= n;
        const double threshold = mu + params.k_sigma * std::sqrt(var);

        for (int i = 0; i < n; ++i) remove[i] = mean_dist[i] > threshold;
    } else {
        parallel_for_chunks(n, [&](std::size_t begin, std::size_t end) {
            std::vector<int> idx;
            std::vector<double> dist;
            for (std::size_t i = begin; i < end; ++i) {
                tree.knn(cloud.positions[i], k + 1, idx, dist);
                Vec3 mu_pos = Vec3::Zero();
                double sum = 0, sum_sq = 0;
                int counted = 0;
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    if (idx[j] == static_cast<int>(i)) continue;
                    mu_pos += cloud.positions[idx[j]];
                    sum += dist[j];
                    sum_sq += dist[j] * dist[j];
                    if (++counted == k) break;
                }
                mu_pos /= k;
                const double mean = sum / k;
                const double var = std::max(0.0, sum_sq / k - mean * mean);
                const double lhs = (cloud.positions[i] - mu_pos).norm();
                remove[i] = lhs > params.k_sigma * std::sqrt(var);
            }
        });
    }

    SorResult result;
    result.kept_indices.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (remove[i]) result.removed_indices.push_back(i);
        else result.kept_indices.push_back(i);
    }
    result.kept = cloud.select(result.kept_indices);
    return result;
}

} // namespace trackfuse
