#pragma once

#include <utility>
#include <vector>

#include "trackfuse/geometry.hpp"

namespace trackfuse {

/// Exact nearest-neighbor KD-tree over an immutable point set. Splits on the
/// axis of largest extent at the coordinate median; leaves hold up to
/// `leaf_size` points. Ties in queries are broken toward the lowest index,
/// so results are reproducible and match a linear scan exactly.
class KdTree {
public:
    explicit KdTree(std::vector<Vec3> points, int leaf_size = 16);

    std::size_t size() const { return points_.size(); }
    const std::vector<Vec3>& points() const { return points_; }

    /// Index of the exact nearest neighbor and its distance (meters).
    std::pair<int, double> nearest(const Vec3& query) const;

    /// The k exact nearest neighbors, ascending by (distance, index).
    /// Returns fewer than k entries only if the tree holds fewer points.
    void knn(const Vec3& query, int k, std::vector<int>& indices, std::vector<double>& distances) const;

private:
    struct Node {
        int left = -1;
        int right = -1;
        int begin = 0;
        int end = 0;
        int dim = 0;
        double split = 0;
        bool leaf() const { return left < 0; }
    };

    int build(int begin, int end);

    template <typename Visitor>
    void search(int node_index, const Vec3& query, Visitor& visitor) const;

    std::vector<Vec3> points_;
    std::vector<int> order_; // permutation grouping leaf points
    std::vector<Node> nodes_;
    int root_ = -1;
    int leaf_size_;
};

} // namespace trackfuse
