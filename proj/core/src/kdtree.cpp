#include "trackfuse/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "trackfuse/errors.hpp"

namespace trackfuse {

KdTree::KdTree(std::vector<Vec3> points, int leaf_size)
    : points_(std::move(points)), leaf_size_(std::max(1, leaf_size)) {
    if (points_.empty()) throw InvalidInput("kdtree: empty point set");
    for (const Vec3& p : points_) {
        if (!p.allFinite()) throw InvalidInput("kdtree: non-finite point");
    }
    order_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) order_[i] = static_cast<int>(i);
    nodes_.reserve(2 * points_.size() / leaf_size_ + 2);
    root_ = build(0, static_cast<int>(points_.size()));
}

int KdTree::build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Node node;
    node.begin = begin;
    node.end = end;

    if (end - begin <= leaf_size_) {
        nodes_[id] = node;
        return id;
    }

    Vec3 lo = points_[order_[begin]], hi = lo;
    for (int i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    const Vec3 extent = hi - lo;
    int dim = 0;
    if (extent.y() > extent.x()) dim = 1;
    if (extent.z() > extent[dim]) dim = 2;

    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         const double ca = points_[a][dim], cb = points_[b][dim];
                         return ca < cb || (ca == cb && a < b);
                     });

    node.dim = dim;
    node.split = points_[order_[mid]][dim];
    node.left = build(begin, mid);
    node.right = build(mid, end);
    nodes_[id] = node;
    return id;
}

namespace {

struct NearestVisitor {
    int best_index = -1;
    double best_d2 = std::numeric_limits<double>::infinity();

    void offer(int index, double d2) {
        if (d2 < best_d2 || (d2 == best_d2 && index < best_index)) {
            best_d2 = d2;
            best_index = index;
        }
    }
    double radius2() const { return best_d2; }
};

struct KnnVisitor {
    int k = 1;
    // (distance^2, index), kept sorted ascending
    std::vector<std::pair<double, int>> hits;

    void offer(int index, double d2) {
        const std::pair<double, int> entry{d2, index};
        if (static_cast<int>(hits.size()) == k && !(entry < hits.back())) return;
        auto pos = std::lower_bound(hits.begin(), hits.end(), entry);
        hits.insert(pos, entry);
        if (static_cast<int>(hits.size()) > k) hits.pop_back();
    }
    double radius2() const {
        return static_cast<int>(hits.size()) == k ? hits.back().first
                                                  : std::numeric_limits<double>::infinity();
    }
};

} // namespace

template <typename Visitor>
void KdTree::search(int node_index, const Vec3& query, Visitor& visitor) const {
    const Node& node = nodes_[node_index];
    if (node.leaf()) {
        for (int i = node.begin; i < node.end; ++i) {
            const int idx = order_[i];
            visitor.offer(idx, (points_[idx] - query).squaredNorm());
        }
        return;
    }
    const double diff = query[node.dim] - node.split;
    const int near = diff < 0 ? node.left : node.right;
    const int far = diff < 0 ? node.right : node.left;
    search(near, query, visitor);
    if (diff * diff <= visitor.radius2()) search(far, query, visitor);
}

std::pair<int, double> KdTree::nearest(const Vec3& query) const {
    NearestVisitor visitor;
    search(root_, query, visitor);
    return {visitor.best_index, std::sqrt(visitor.best_d2)};
}

void KdTree::knn(const Vec3& query, int k, std::vector<int>& indices, std::vector<double>& distances) const {
    if (k <= 0) throw InvalidInput("kdtree: k must be positive");
    KnnVisitor visitor;
    visitor.k = std::min<int>(k, static_cast<int>(points_.size()));
    visitor.hits.reserve(visitor.k + 1);
    search(root_, query, visitor);
    indices.resize(visitor.hits.size());
    distances.resize(visitor.hits.size());
    for (std::size_t i = 0; i < visitor.hits.size(); ++i) {
        indices[i] = visitor.hits[i].second;
        distances[i] = std::sqrt(visitor.hits[i].first);
    }
}

} // namespace trackfuse
