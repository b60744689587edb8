#pragma once

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

enum class IcpVariant { point_to_point, point_to_plane };

struct IcpParams {
    int max_iterations = 30;
    double correspondence_cutoff = 0.02; // meters
    double convergence_delta = 1e-5;     // meters of per-point motion between iterations
    IcpVariant variant = IcpVariant::point_to_plane;
    int reference_samples = 10000; // surface samples drawn from the reference mesh
    int measured_samples = 3000;   // cap on measured points fed to the solver
};

struct PoseEstimate {
    RigidTransform object_to_camera;
    double residual_rms = 0; // meters
    int iterations_used = 0;
    bool converged = false;
};

/// Rigid transform minimizing sum ||R p_i + t - q_i||^2 (Kabsch, SVD).
RigidTransform kabsch(const std::vector<Vec3>& source, const std::vector<Vec3>& target);

/// ICP against a fixed reference cloud in the object frame. `measured` is a
/// camera-frame cloud; `init` and the result are object-to-camera poses.
/// Each iteration matches measured points to their nearest reference point
/// within the cutoff and solves either a Kabsch step or a linearized
/// point-to-plane step (reference normals required for the latter). Returns
/// the best-residual pose seen; throws NumericError when fewer than 6
/// correspondences survive.
PoseEstimate refine_pose(const ColoredPointCloud& measured, const ColoredPointCloud& reference,
                         const RigidTransform& init, const IcpParams& params);

/// First-frame alignment: identity rotation, translation from the centroid
/// offset between the measured cloud and a surface sampling of the metric
/// prior mesh, then refine_pose. Defines the object frame used downstream.
PoseEstimate init_pose(const ColoredPointCloud& first_cloud_camera_frame,
                       const TriangleMesh& prior_mesh_metric, const IcpParams& params);

} // namespace trackfuse
