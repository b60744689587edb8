#pragma once

#include "trackfuse/point_cloud.hpp"
#include "trackfuse/sor.hpp"

namespace trackfuse {

/// PCA-aligned oriented bounding box. Column i of `axes` is the box axis with
/// the i-th largest covariance eigenvalue; the triple is right-handed.
struct OrientedBoundingBox {
    Vec3 center = Vec3::Zero();
    Mat3 axes = Mat3::Identity();
    Vec3 half_extents = Vec3::Zero();

    double max_side() const { return 2.0 * half_extents.maxCoeff(); }
    bool contains(const Vec3& p, double slack = 1e-9) const;
};

/// Axes from the position covariance (descending eigenvalue order, signs
/// fixed so each axis's largest-magnitude component is positive; the third
/// axis completes a right-handed frame). Extents from min/max projections.
/// Planar or linear clouds get the missing axes padded via Gram-Schmidt
/// against the world axes; a single repeated point yields identity axes and
/// zero extents.
OrientedBoundingBox compute_obb(const ColoredPointCloud& cloud);
OrientedBoundingBox compute_obb_points(const std::vector<Vec3>& points);

/// Eq.-style scale factor between a generated model and the real object:
/// both clouds are SOR-denoised, then s = g_max / r_max with g_max the
/// estimated (generated-model) cloud's max OBB side and r_max the measured
/// cloud's. Throws NumericError if a cloud empties out or r_max is zero.
double recover_scale(const ColoredPointCloud& measured_partial,
                     const ColoredPointCloud& estimated_partial, const SorParams& sor);

/// Vertices divided by s (generated-model units -> meters); topology and
/// colors unchanged. Requires s > 0.
TriangleMesh apply_scale(const TriangleMesh& mesh, double s);

} // namespace trackfuse
