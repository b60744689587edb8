#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "trackfuse/geometry.hpp"

namespace trackfuse {

/// Point cloud with per-point RGB colors in [0,1] and optional unit normals.
/// Positions are meters. `normals` is either empty or position-aligned.
struct ColoredPointCloud {
    std::vector<Vec3> positions;
    std::vector<Vec3> colors;
    std::vector<Vec3> normals;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
    bool has_normals() const { return !normals.empty(); }

    void reserve(std::size_t n);
    void push_back(const Vec3& p, const Vec3& c);
    void push_back(const Vec3& p, const Vec3& c, const Vec3& n);

    /// Cloud restricted to `indices`, in the given order.
    ColoredPointCloud select(const std::vector<int>& indices) const;

    /// Throws InvalidInput if lengths disagree, a position is non-finite,
    /// or a normal deviates from unit length by more than 1e-6.
    void validate() const;
};

using Face = std::array<int, 3>;

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec3> vertex_colors;

    bool empty() const { return vertices.empty() || faces.empty(); }

    /// Throws InvalidInput on out-of-range indices, degenerate faces, or
    /// non-finite vertices.
    void validate() const;
};

/// Positions mapped by R p + t; normals rotated; colors untouched.
ColoredPointCloud transform_cloud(const ColoredPointCloud& cloud, const RigidTransform& t);

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& t);

Vec3 centroid(const std::vector<Vec3>& points);

/// Axis-aligned bounding box as (min, max) corners.
std::pair<Vec3, Vec3> bounding_box(const std::vector<Vec3>& points);

Vec3 face_normal(const TriangleMesh& mesh, int face_index);

double face_area(const TriangleMesh& mesh, int face_index);

/// Area-weighted vertex normals (normalized; zero for isolated vertices).
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh);

/// True iff every undirected edge is shared by exactly two faces.
bool is_edge_manifold_closed(const TriangleMesh& mesh);

/// V - E + F over the welded vertex/edge sets.
long euler_characteristic(const TriangleMesh& mesh);

} // namespace trackfuse
