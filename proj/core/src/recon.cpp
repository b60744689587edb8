#include "trackfuse/recon.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "trackfuse/errors.hpp"
#include "trackfuse/kdtree.hpp"
#include "trackfuse/parallel.hpp"

namespace trackfuse {

void ScalarGrid::validate() const {
    if (nx < 2 || ny < 2 || nz < 2) throw InvalidInput("grid: resolution must be >= 2 per axis");
    if (!(cell_size > 0)) throw InvalidInput("grid: cell_size must be positive");
    if (values.size() != static_cast<std::size_t>(nx) * ny * nz)
        throw InvalidInput("grid: values length mismatch");
}

double ScalarGrid::sample(const Vec3& p) const {
    Vec3 u = (p - origin) / cell_size;
    u.x() = std::clamp(u.x(), 0.0, static_cast<double>(nx - 1));
    u.y() = std::clamp(u.y(), 0.0, static_cast<double>(ny - 1));
    u.z() = std::clamp(u.z(), 0.0, static_cast<double>(nz - 1));
    const int i0 = std::min(static_cast<int>(u.x()), nx - 2);
    const int j0 = std::min(static_cast<int>(u.y()), ny - 2);
    const int k0 = std::min(static_cast<int>(u.z()), nz - 2);
    const double fx = u.x() - i0, fy = u.y() - j0, fz = u.z() - k0;

    double acc = 0;
    for (int dk = 0; dk < 2; ++dk) {
        for (int dj = 0; dj < 2; ++dj) {
            for (int di = 0; di < 2; ++di) {
                const double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                acc += w * at(i0 + di, j0 + dj, k0 + dk);
            }
        }
    }
    return acc;
}

ColoredPointCloud estimate_normals(const ColoredPointCloud& cloud, int k, const Vec3& viewpoint) {
    const int n = static_cast<int>(cloud.size());
    if (k < 3) throw InvalidInput("estimate_normals: k must be >= 3");
    if (n <= k) throw InvalidInput("estimate_normals: cloud must have more than k points");

    const KdTree tree(cloud.positions);
    ColoredPointCloud out = cloud;
    out.normals.assign(n, Vec3::Zero());

    parallel_for_chunks(n, [&](std::size_t begin, std::size_t end) {
        std::vector<int> idx;
        std::vector<double> dist;
        for (std::size_t i = begin; i < end; ++i) {
            tree.knn(cloud.positions[i], k + 1, idx, dist); // self included

            Vec3 mean = Vec3::Zero();
            for (int j : idx) mean += cloud.positions[j];
            mean /= static_cast<double>(idx.size());

            Mat3 cov = Mat3::Zero();
            for (int j : idx) {
                const Vec3 d = cloud.positions[j] - mean;
                cov += d * d.transpose();
            }
            Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
            Vec3 normal = eig.eigenvectors().col(0); // smallest eigenvalue
            if (normal.dot(viewpoint - cloud.positions[i]) < 0) normal = -normal;
            out.normals[i] = normal.normalized();
        }
    });
    return out;
}

namespace {

struct PoissonGrid {
    ScalarGrid grid; // holds chi after the solve
    std::vector<double> vx, vy, vz;
};

// Conjugate gradient for (6 x_c - sum of neighbor x) = b on interior nodes,
// Dirichlet zero boundary. Returns iterations used; throws on non-convergence.
int solve_poisson(ScalarGrid& g, const std::vector<double>& b, double tol, int max_iters) {
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const std::size_t total = b.size();
    std::vector<double>& x = g.values;
    x.assign(total, 0.0);

    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        parallel_for_chunks(static_cast<std::size_t>(nz - 2), [&](std::size_t kb, std::size_t ke) {
            for (std::size_t kk = kb; kk < ke; ++kk) {
                const int k = static_cast<int>(kk) + 1;
                for (int j = 1; j < ny - 1; ++j) {
                    for (int i = 1; i < nx - 1; ++i) {
                        const std::size_t c = g.index(i, j, k);
                        out[c] = 6.0 * in[c] - in[c - 1] - in[c + 1] - in[c - nx] - in[c + nx] -
                                 in[c - static_cast<std::size_t>(nx) * ny] -
                                 in[c + static_cast<std::size_t>(nx) * ny];
                    }
                }
            }
        });
    };

    auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
        double sum = 0;
        for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * c[i];
        return sum;
    };

    std::vector<double> r = b, p = b, ap(total);
    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0) return 0;

    double rr = dot(r, r);
    for (int iter = 1; iter <= max_iters; ++iter) {
        apply(p, ap);
        const double p_ap = dot(p, ap);
        if (p_ap <= 0) throw NumericError("poisson: CG hit a non-positive curvature direction");
        const double alpha = rr / p_ap;
        for (std::size_t i = 0; i < total; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < total; ++i) r[i] -= alpha * ap[i];
        const double rr_new = dot(r, r);
        if (std::sqrt(rr_new) <= tol * b_norm) return iter;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < total; ++i) p[i] = r[i] + beta * p[i];
    }
    throw NumericError("poisson: CG did not reach tolerance within max iterations");
}

} // namespace

TriangleMesh poisson_reconstruct(const ColoredPointCloud& cloud, const ReconParams& params) {
    if (cloud.empty()) throw InvalidInput("poisson: empty cloud");
    if (!cloud.has_normals()) throw InvalidInput("poisson: cloud must carry normals");
    cloud.validate();
    if (params.grid_resolution < 4) throw InvalidInput("poisson: grid_resolution too small");

    // grid over the 10%-padded bounding box, cube cells
    const auto [lo, hi] = bounding_box(cloud.positions);
    const Vec3 extent = hi - lo;
    const double pad_scale = std::max(extent.maxCoeff(), 1e-6);
    const Vec3 pad = extent.cwiseMax(0.05 * pad_scale) * 0.10;
    const Vec3 glo = lo - pad;
    const Vec3 gext = extent + 2.0 * pad;

    ScalarGrid grid;
    grid.cell_size = gext.maxCoeff() / (params.grid_resolution - 1);
    grid.origin = glo;
    grid.nx = std::max(4, static_cast<int>(std::ceil(gext.x() / grid.cell_size)) + 1);
    grid.ny = std::max(4, static_cast<int>(std::ceil(gext.y() / grid.cell_size)) + 1);
    grid.nz = std::max(4, static_cast<int>(std::ceil(gext.z() / grid.cell_size)) + 1);
    const std::size_t total = static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz;

    // splat unit normals into a node-centered vector field
    std::vector<double> vx(total, 0.0), vy(total, 0.0), vz(total, 0.0);
    for (std::size_t s = 0; s < cloud.size(); ++s) {
        const Vec3 u = (cloud.positions[s] - grid.origin) / grid.cell_size;
        const int i0 = std::clamp(static_cast<int>(u.x()), 0, grid.nx - 2);
        const int j0 = std::clamp(static_cast<int>(u.y()), 0, grid.ny - 2);
        const int k0 = std::clamp(static_cast<int>(u.z()), 0, grid.nz - 2);
        const double fx = std::clamp(u.x() - i0, 0.0, 1.0);
        const double fy = std::clamp(u.y() - j0, 0.0, 1.0);
        const double fz = std::clamp(u.z() - k0, 0.0, 1.0);
        const Vec3& nrm = cloud.normals[s];
        for (int dk = 0; dk < 2; ++dk) {
            for (int dj = 0; dj < 2; ++dj) {
                for (int di = 0; di < 2; ++di) {
                    const double w =
                        (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                    const std::size_t c = grid.index(i0 + di, j0 + dj, k0 + dk);
                    vx[c] += w * nrm.x();
                    vy[c] += w * nrm.y();
                    vz[c] += w * nrm.z();
                }
            }
        }
    }

    // b = -div(V) * h^2 by central differences, interior only
    std::vector<double> b(total, 0.0);
    const std::size_t sx = 1, sy = grid.nx, sz = static_cast<std::size_t>(grid.nx) * grid.ny;
    for (int k = 1; k < grid.nz - 1; ++k) {
        for (int j = 1; j < grid.ny - 1; ++j) {
            for (int i = 1; i < grid.nx - 1; ++i) {
                const std::size_t c = grid.index(i, j, k);
                const double div = (vx[c + sx] - vx[c - sx]) + (vy[c + sy] - vy[c - sy]) +
                                   (vz[c + sz] - vz[c - sz]);
                b[c] = -0.5 * grid.cell_size * div;
            }
        }
    }

    grid.values.assign(total, 0.0);
    solve_poisson(grid, b, params.cg_tolerance, params.cg_max_iters);

    double iso = 0;
    for (const Vec3& p : cloud.positions) iso += grid.sample(p);
    iso /= static_cast<double>(cloud.size());

    TriangleMesh mesh = marching_cubes(grid, iso);
    if (mesh.faces.empty()) throw NumericError("poisson: reconstruction produced no surface");

    // trim far-field faces, then compact and color from the nearest sample
    const KdTree tree(cloud.positions);
    const double max_dist = params.trim_distance * grid.cell_size;
    std::vector<Face> kept_faces;
    kept_faces.reserve(mesh.faces.size());
    for (const Face& f : mesh.faces) {
        const Vec3 c =
            (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0;
        if (tree.nearest(c).second <= max_dist) kept_faces.push_back(f);
    }
    if (kept_faces.empty()) throw NumericError("poisson: all faces trimmed away");

    std::vector<int> remap(mesh.vertices.size(), -1);
    TriangleMesh out;
    out.faces.reserve(kept_faces.size());
    for (const Face& f : kept_faces) {
        Face nf;
        for (int k = 0; k < 3; ++k) {
            if (remap[f[k]] < 0) {
                remap[f[k]] = static_cast<int>(out.vertices.size());
                out.vertices.push_back(mesh.vertices[f[k]]);
            }
            nf[k] = remap[f[k]];
        }
        out.faces.push_back(nf);
    }
    out.vertex_colors.resize(out.vertices.size());
    parallel_for_chunks(out.vertices.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out.vertex_colors[i] = cloud.colors[tree.nearest(out.vertices[i]).first];
        }
    });
    return out;
}

} // namespace trackfuse
