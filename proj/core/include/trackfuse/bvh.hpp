#pragma once

#include <limits>
#include <optional>

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

struct RayHit {
    double t = std::numeric_limits<double>::infinity();
    int face = -1;
    double u = 0, v = 0; // barycentric coords of corners 1 and 2
};

/// Binary AABB hierarchy over mesh triangles (median split on the longest
/// centroid axis, leaves of up to 4 triangles). Closest-hit queries match
/// brute-force intersection exactly; ties on t resolve to the lowest face
/// index.
class Bvh {
public:
    explicit Bvh(const TriangleMesh& mesh);

    /// Closest intersection with t in (t_min, inf); empty if the ray misses.
    std::optional<RayHit> intersect(const Vec3& origin, const Vec3& dir, double t_min = 1e-9) const;

    const TriangleMesh& mesh() const { return mesh_; }

private:
    struct Node {
        Vec3 lo, hi;
        int left = -1, right = -1;
        int begin = 0, end = 0;
        bool leaf() const { return left < 0; }
    };

    int build(int begin, int end);

    TriangleMesh mesh_;
    std::vector<Vec3> centroids_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

/// Moller-Trumbore; returns hit with t > t_min, or nullopt.
std::optional<RayHit> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double t_min = 1e-9);

} // namespace trackfuse
