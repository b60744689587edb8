#pragma once

#include <vector>

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

enum class SorMode {
    /// Remove point i iff its mean distance d_i to the N nearest neighbors
    /// exceeds mean(d) + k_sigma * std(d) over the whole cloud.
    classic,
    /// Remove point p iff ||p - mu|| > k_sigma * sigma, with mu the mean
    /// position of its N nearest neighbors and sigma the standard deviation
    /// of the N neighbor distances.
    paper_literal,
};

struct SorParams {
    int n_neighbors = 16;
    double k_sigma = 2.0;
    SorMode mode = SorMode::classic;
};

struct SorResult {
    ColoredPointCloud kept;
    std::vector<int> kept_indices;
    std::vector<int> removed_indices;
};

/// Statistical outlier removal. Requires cloud.size() > n_neighbors.
SorResult sor_filter(const ColoredPointCloud& cloud, const SorParams& params);

} // namespace trackfuse
