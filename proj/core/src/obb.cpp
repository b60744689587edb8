#include "trackfuse/obb.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <limits>

#include "trackfuse/errors.hpp"

namespace trackfuse {

bool OrientedBoundingBox::contains(const Vec3& p, double slack) const {
    const Vec3 local = axes.transpose() * (p - center);
    for (int k = 0; k < 3; ++k) {
        if (std::abs(local[k]) > half_extents[k] + slack) return false;
    }
    return true;
}

namespace {

// Largest-magnitude component made positive; ties resolved toward +x,+y,+z.
Vec3 fix_sign(const Vec3& axis) {
    int arg = 0;
    double mag = std::abs(axis[0]);
    for (int k = 1; k < 3; ++k) {
        if (std::abs(axis[k]) > mag) {
            mag = std::abs(axis[k]);
            arg = k;
        }
    }
    return axis[arg] < 0 ? Vec3(-axis) : axis;
}

} // namespace

OrientedBoundingBox compute_obb_points(const std::vector<Vec3>& points) {
    if (points.empty()) throw InvalidInput("obb: empty point set");

    const Vec3 mean = centroid(points);
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : points) {
        const Vec3 d = p - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(points.size());

    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 evals_asc = eig.eigenvalues();
    const Mat3 evecs = eig.eigenvectors();

    const double max_eval = std::max(evals_asc[2], 0.0);
    const double rank_tol = std::max(1e-12, 1e-9 * max_eval);

    // descending order
    std::array<Vec3, 3> axes;
    std::array<double, 3> evals{};
    for (int k = 0; k < 3; ++k) {
        axes[k] = evecs.col(2 - k);
        evals[k] = evals_asc[2 - k];
    }

    // pad degenerate directions with world axes (Gram-Schmidt)
    int valid = 0;
    while (valid < 3 && evals[valid] > rank_tol) ++valid;
    if (valid < 3) {
        std::array<Vec3, 3> basis;
        int count = 0;
        for (int k = 0; k < valid; ++k) basis[count++] = axes[k].normalized();
        for (const Vec3& world : {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}) {
            if (count == 3) break;
            Vec3 candidate = world;
            for (int k = 0; k < count; ++k) candidate -= candidate.dot(basis[k]) * basis[k];
            if (candidate.norm() > 1e-6) basis[count++] = candidate.normalized();
        }
        for (int k = 0; k < 3; ++k) axes[k] = basis[k];
    }

    OrientedBoundingBox obb;
    obb.axes.col(0) = fix_sign(axes[0]);
    obb.axes.col(1) = fix_sign(axes[1]);
    obb.axes.col(2) = obb.axes.col(0).cross(obb.axes.col(1)); // right-handed
    obb.axes.col(0).normalize();
    obb.axes.col(1).normalize();
    obb.axes.col(2).normalize();

    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& p : points) {
        const Vec3 local = obb.axes.transpose() * (p - mean);
        lo = lo.cwiseMin(local);
        hi = hi.cwiseMax(local);
    }
    obb.half_extents = (hi - lo) / 2.0;
    obb.center = mean + obb.axes * ((hi + lo) / 2.0);
    return obb;
}

OrientedBoundingBox compute_obb(const ColoredPointCloud& cloud) {
    return compute_obb_points(cloud.positions);
}

double recover_scale(const ColoredPointCloud& measured_partial,
                     const ColoredPointCloud& estimated_partial, const SorParams& sor) {
    if (measured_partial.empty() || estimated_partial.empty())
        throw InvalidInput("recover_scale: empty input cloud");

    const ColoredPointCloud measured = sor_filter(measured_partial, sor).kept;
    const ColoredPointCloud estimated = sor_filter(estimated_partial, sor).kept;
    if (measured.empty() || estimated.empty())
        throw NumericError("recover_scale: cloud empty after SOR filtering");

    const double r_max = compute_obb(measured).max_side();
    const double g_max = compute_obb(estimated).max_side();
    if (r_max <= 0) throw NumericError("recover_scale: measured cloud has zero extent");
    return g_max / r_max;
}

TriangleMesh apply_scale(const TriangleMesh& mesh, double s) {
    if (!(s > 0)) throw InvalidInput("apply_scale: scale must be positive");
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v /= s;
    return out;
}

} // namespace trackfuse
