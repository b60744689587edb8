#include "trackfuse/point_cloud.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "trackfuse/errors.hpp"

namespace trackfuse {

void ColoredPointCloud::reserve(std::size_t n) {
    positions.reserve(n);
    colors.reserve(n);
    normals.reserve(n);
}

void ColoredPointCloud::push_back(const Vec3& p, const Vec3& c) {
    positions.push_back(p);
    colors.push_back(c);
}

void ColoredPointCloud::push_back(const Vec3& p, const Vec3& c, const Vec3& n) {
    positions.push_back(p);
    colors.push_back(c);
    normals.push_back(n);
}

ColoredPointCloud ColoredPointCloud::select(const std::vector<int>& indices) const {
    ColoredPointCloud out;
    out.reserve(indices.size());
    for (int i : indices) {
        out.positions.push_back(positions.at(i));
        out.colors.push_back(colors.at(i));
        if (has_normals()) out.normals.push_back(normals.at(i));
    }
    return out;
}

void ColoredPointCloud::validate() const {
    if (colors.size() != positions.size())
        throw InvalidInput("point cloud: colors/positions length mismatch");
    if (!normals.empty() && normals.size() != positions.size())
        throw InvalidInput("point cloud: normals/positions length mismatch");
    for (const Vec3& p : positions) {
        if (!p.allFinite()) throw InvalidInput("point cloud: non-finite position");
    }
    for (const Vec3& n : normals) {
        if (std::abs(n.norm() - 1.0) > 1e-6)
            throw InvalidInput("point cloud: non-unit normal");
    }
}

void TriangleMesh::validate() const {
    if (!vertex_colors.empty() && vertex_colors.size() != vertices.size())
        throw InvalidInput("mesh: vertex_colors/vertices length mismatch");
    for (const Vec3& v : vertices) {
        if (!v.allFinite()) throw InvalidInput("mesh: non-finite vertex");
    }
    const int n = static_cast<int>(vertices.size());
    for (const Face& f : faces) {
        for (int k = 0; k < 3; ++k) {
            if (f[k] < 0 || f[k] >= n) throw InvalidInput("mesh: face index out of range");
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw InvalidInput("mesh: degenerate face");
    }
}

ColoredPointCloud transform_cloud(const ColoredPointCloud& cloud, const RigidTransform& t) {
    ColoredPointCloud out;
    out.positions.reserve(cloud.size());
    for (const Vec3& p : cloud.positions) out.positions.push_back(t.apply(p));
    out.colors = cloud.colors;
    if (cloud.has_normals()) {
        out.normals.reserve(cloud.size());
        for (const Vec3& n : cloud.normals) out.normals.push_back(t.rotation * n);
    }
    return out;
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& t) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = t.apply(v);
    return out;
}

Vec3 centroid(const std::vector<Vec3>& points) {
    if (points.empty()) throw InvalidInput("centroid: empty point set");
    Vec3 sum = Vec3::Zero();
    for (const Vec3& p : points) sum += p;
    return sum / static_cast<double>(points.size());
}

std::pair<Vec3, Vec3> bounding_box(const std::vector<Vec3>& points) {
    if (points.empty()) throw InvalidInput("bounding_box: empty point set");
    Vec3 lo = points[0], hi = points[0];
    for (const Vec3& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return {lo, hi};
}

Vec3 face_normal(const TriangleMesh& mesh, int face_index) {
    const Face& f = mesh.faces.at(face_index);
    const Vec3 e1 = mesh.vertices[f[1]] - mesh.vertices[f[0]];
    const Vec3 e2 = mesh.vertices[f[2]] - mesh.vertices[f[0]];
    Vec3 n = e1.cross(e2);
    const double len = n.norm();
    return len > 0 ? Vec3(n / len) : Vec3::Zero();
}

double face_area(const TriangleMesh& mesh, int face_index) {
    const Face& f = mesh.faces.at(face_index);
    const Vec3 e1 = mesh.vertices[f[1]] - mesh.vertices[f[0]];
    const Vec3 e2 = mesh.vertices[f[2]] - mesh.vertices[f[0]];
    return 0.5 * e1.cross(e2).norm();
}

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh) {
    std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        const Face& f = mesh.faces[i];
        const Vec3 e1 = mesh.vertices[f[1]] - mesh.vertices[f[0]];
        const Vec3 e2 = mesh.vertices[f[2]] - mesh.vertices[f[0]];
        const Vec3 weighted = 0.5 * e1.cross(e2); // area-weighted
        for (int k = 0; k < 3; ++k) normals[f[k]] += weighted;
    }
    for (Vec3& n : normals) {
        const double len = n.norm();
        if (len > 0) n /= len;
    }
    return normals;
}

namespace {

std::map<std::pair<int, int>, int> edge_face_counts(const TriangleMesh& mesh) {
    std::map<std::pair<int, int>, int> counts;
    for (const Face& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            ++counts[{a, b}];
        }
    }
    return counts;
}

} // namespace

bool is_edge_manifold_closed(const TriangleMesh& mesh) {
    if (mesh.empty()) return false;
    for (const auto& [edge, count] : edge_face_counts(mesh)) {
        if (count != 2) return false;
    }
    return true;
}

long euler_characteristic(const TriangleMesh& mesh) {
    const auto edges = edge_face_counts(mesh);
    std::vector<std::uint8_t> used(mesh.vertices.size(), 0);
    for (const Face& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) used[f[k]] = 1;
    }
    long v = 0;
    for (std::uint8_t u : used) v += u;
    return v - static_cast<long>(edges.size()) + static_cast<long>(mesh.faces.size());
}

} // namespace trackfuse
