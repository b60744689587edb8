#include "trackfuse/bvh.hpp"

#include <algorithm>

#include "trackfuse/errors.hpp"

namespace trackfuse {

std::optional<RayHit> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double t_min) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < 1e-14) return std::nullopt;
    const double inv_det = 1.0 / det;
    const Vec3 tvec = origin - a;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = e2.dot(qvec) * inv_det;
    if (t <= t_min) return std::nullopt;
    RayHit hit;
    hit.t = t;
    hit.u = u;
    hit.v = v;
    return hit;
}

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(mesh) {
    if (mesh_.faces.empty()) throw InvalidInput("bvh: mesh has no faces");
    const int n = static_cast<int>(mesh_.faces.size());
    centroids_.resize(n);
    order_.resize(n);
    for (int f = 0; f < n; ++f) {
        const Face& face = mesh_.faces[f];
        centroids_[f] =
            (mesh_.vertices[face[0]] + mesh_.vertices[face[1]] + mesh_.vertices[face[2]]) / 3.0;
        order_[f] = f;
    }
    nodes_.reserve(2 * n);
    root_ = build(0, n);
}

int Bvh::build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Node node;
    node.begin = begin;
    node.end = end;

    node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.hi = -node.lo;
    for (int i = begin; i < end; ++i) {
        const Face& f = mesh_.faces[order_[i]];
        for (int k = 0; k < 3; ++k) {
            node.lo = node.lo.cwiseMin(mesh_.vertices[f[k]]);
            node.hi = node.hi.cwiseMax(mesh_.vertices[f[k]]);
        }
    }

    if (end - begin <= 4) {
        nodes_[id] = node;
        return id;
    }

    Vec3 clo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 chi = -clo;
    for (int i = begin; i < end; ++i) {
        clo = clo.cwiseMin(centroids_[order_[i]]);
        chi = chi.cwiseMax(centroids_[order_[i]]);
    }
    const Vec3 extent = chi - clo;
    int dim = 0;
    if (extent.y() > extent.x()) dim = 1;
    if (extent.z() > extent[dim]) dim = 2;

    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         const double ca = centroids_[a][dim], cb = centroids_[b][dim];
                         return ca < cb || (ca == cb && a < b);
                     });

    node.left = build(begin, mid);
    node.right = build(mid, end);
    nodes_[id] = node;
    return id;
}

namespace {

// slab test against [lo,hi]; returns entry distance or infinity on miss
double box_distance(const Vec3& origin, const Vec3& inv_dir, const Vec3& lo, const Vec3& hi,
                    double t_best) {
    double t_near = 0.0, t_far = t_best;
    for (int k = 0; k < 3; ++k) {
        double t0 = (lo[k] - origin[k]) * inv_dir[k];
        double t1 = (hi[k] - origin[k]) * inv_dir[k];
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
        if (t_near > t_far) return std::numeric_limits<double>::infinity();
    }
    return t_near;
}

} // namespace

std::optional<RayHit> Bvh::intersect(const Vec3& origin, const Vec3& dir, double t_min) const {
    const Vec3 inv_dir(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
    RayHit best;
    int stack[64];
    int top = 0;
    stack[top++] = root_;

    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (box_distance(origin, inv_dir, node.lo, node.hi, best.t) ==
            std::numeric_limits<double>::infinity())
            continue;
        if (node.leaf()) {
            for (int i = node.begin; i < node.end; ++i) {
                const int face = order_[i];
                const Face& f = mesh_.faces[face];
                const auto hit = intersect_triangle(origin, dir, mesh_.vertices[f[0]],
                                                    mesh_.vertices[f[1]], mesh_.vertices[f[2]], t_min);
                if (!hit) continue;
                if (hit->t < best.t || (hit->t == best.t && face < best.face)) {
                    best = *hit;
                    best.face = face;
                }
            }
        } else {
            // near child last so it pops first
            const double dl = box_distance(origin, inv_dir, nodes_[node.left].lo,
                                           nodes_[node.left].hi, best.t);
            const double dr = box_distance(origin, inv_dir, nodes_[node.right].lo,
                                           nodes_[node.right].hi, best.t);
            if (dl < dr) {
                if (dr != std::numeric_limits<double>::infinity()) stack[top++] = node.right;
                stack[top++] = node.left;
            } else {
                if (dl != std::numeric_limits<double>::infinity()) stack[top++] = node.left;
                if (dr != std::numeric_limits<double>::infinity()) stack[top++] = node.right;
            }
        }
    }

    if (best.face < 0) return std::nullopt;
    return best;
}

} // namespace trackfuse
