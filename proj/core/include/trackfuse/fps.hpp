#pragma once

#include <vector>

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

/// Greedy farthest point sampling: starting from seed_index, repeatedly picks
/// the point with the largest distance to the already-selected set (ties to
/// the lowest index). Returns target_count indices in selection order.
std::vector<int> fps_indices(const std::vector<Vec3>& points, int target_count, int seed_index = 0);

std::vector<int> fps(const ColoredPointCloud& cloud, int target_count, int seed_index = 0);

} // namespace trackfuse
