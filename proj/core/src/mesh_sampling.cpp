#include "trackfuse/mesh_sampling.hpp"

#include <algorithm>
#include <cmath>

#include "trackfuse/errors.hpp"
#include "trackfuse/rng.hpp"

namespace trackfuse {

ColoredPointCloud sample_mesh_surface(const TriangleMesh& mesh, int count, std::uint64_t seed) {
    if (mesh.empty()) throw InvalidInput("sample_mesh_surface: empty mesh");
    if (count <= 0) throw InvalidInput("sample_mesh_surface: count must be positive");

    const std::size_t n_faces = mesh.faces.size();
    std::vector<double> cumulative(n_faces);
    std::vector<Vec3> normals(n_faces);
    double total = 0;
    for (std::size_t f = 0; f < n_faces; ++f) {
        const Face& face = mesh.faces[f];
        const Vec3 e1 = mesh.vertices[face[1]] - mesh.vertices[face[0]];
        const Vec3 e2 = mesh.vertices[face[2]] - mesh.vertices[face[0]];
        const Vec3 cross = e1.cross(e2);
        const double area = 0.5 * cross.norm();
        total += area;
        cumulative[f] = total;
        normals[f] = area > 0 ? Vec3(cross / (2.0 * area)) : Vec3::UnitZ();
    }
    if (total <= 0) throw InvalidInput("sample_mesh_surface: mesh has zero area");

    const bool has_colors = mesh.vertex_colors.size() == mesh.vertices.size();
    Rng rng(seed);
    ColoredPointCloud cloud;
    cloud.reserve(count);
    for (int s = 0; s < count; ++s) {
        const double r = rng.uniform() * total;
        const std::size_t f =
            std::min(static_cast<std::size_t>(
                         std::lower_bound(cumulative.begin(), cumulative.end(), r) -
                         cumulative.begin()),
                     n_faces - 1);
        double u = rng.uniform();
        double v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const Face& face = mesh.faces[f];
        const Vec3& a = mesh.vertices[face[0]];
        const Vec3& b = mesh.vertices[face[1]];
        const Vec3& c = mesh.vertices[face[2]];
        const Vec3 p = a + u * (b - a) + v * (c - a);
        Vec3 color(0.5, 0.5, 0.5);
        if (has_colors) {
            color = (1.0 - u - v) * mesh.vertex_colors[face[0]] +
                    u * mesh.vertex_colors[face[1]] + v * mesh.vertex_colors[face[2]];
        }
        cloud.push_back(p, color, normals[f]);
    }
    return cloud;
}

} // namespace trackfuse
