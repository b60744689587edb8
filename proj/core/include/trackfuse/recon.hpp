#pragma once

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

/// Regular scalar grid; value index (i,j,k) -> i + nx*(j + ny*k). Cells are
/// cubes of side cell_size; node (i,j,k) sits at origin + cell_size*(i,j,k).
struct ScalarGrid {
    int nx = 0, ny = 0, nz = 0;
    Vec3 origin = Vec3::Zero();
    double cell_size = 0;
    std::vector<double> values;

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    Vec3 position(int i, int j, int k) const {
        return origin + cell_size * Vec3(i, j, k);
    }
    /// Trilinear sample; clamps to the grid domain.
    double sample(const Vec3& p) const;

    void validate() const;
};

struct ReconParams {
    int grid_resolution = 64;  // cells along the longest padded axis
    int normal_k = 16;         // neighbors for normal PCA
    double cg_tolerance = 1e-6;
    int cg_max_iters = 2000;
    double trim_distance = 2.0; // multiple of cell_size
};

/// Per-point normal from the smallest-eigenvalue eigenvector of the k-NN
/// covariance, oriented so normal . (viewpoint - p) > 0. Requires more than
/// k points.
ColoredPointCloud estimate_normals(const ColoredPointCloud& cloud, int k, const Vec3& viewpoint);

/// Indicator-field surface reconstruction on a regular grid: normals are
/// splatted into a trilinear vector field V, lap(chi) = div(V) is solved by
/// conjugate gradient (7-point Laplacian, Dirichlet zero boundary), the
/// iso-level is the mean of chi sampled at the inputs, and the surface is
/// extracted by marching cubes. Triangles whose centroid lies farther than
/// trim_distance*cell_size from the nearest input point are removed; vertex
/// colors come from the nearest input point.
TriangleMesh poisson_reconstruct(const ColoredPointCloud& cloud, const ReconParams& params);

/// Standard 256-case marching cubes with linear edge interpolation. Vertices
/// shared between adjacent cells are welded, so closed level sets come out
/// watertight. Winding is consistent with outward normals where the field
/// gradient points outward (field < iso inside).
TriangleMesh marching_cubes(const ScalarGrid& grid, double iso);

} // namespace trackfuse
