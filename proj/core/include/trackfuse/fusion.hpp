#pragma once

#include <cstdint>
#include <limits>

#include "trackfuse/camera.hpp"
#include "trackfuse/icp.hpp"
#include "trackfuse/recon.hpp"
#include "trackfuse/sor.hpp"

namespace trackfuse {

/// Near-uniform unit directions (Fibonacci lattice) with occupancy flags.
/// A frame whose viewing direction lands within tolerance_rad of an
/// unoccupied direction is a keyframe.
struct ViewpointSphere {
    std::vector<Vec3> directions;
    std::vector<std::uint8_t> occupied;
    double tolerance_rad = 0;
    RigidTransform anchor; // first-frame object-to-camera pose

    int size() const { return static_cast<int>(directions.size()); }
};

struct ViewpointDecision {
    bool trigger = false;
    int viewpoint_index = -1;
};

/// Builds the lattice, sets tolerance_rad to half the minimum pairwise
/// angular separation (pi for a single viewpoint), and marks the direction
/// nearest the anchor's viewing direction as occupied.
ViewpointSphere make_sphere(int n, const RigidTransform& anchor);

/// Viewing direction = unit vector from the object origin to the camera
/// center, in the object frame.
Vec3 viewing_direction(const RigidTransform& object_to_camera);

/// trigger iff the angularly nearest viewpoint is unoccupied and within
/// tolerance; the index reported is that nearest viewpoint (or -1 when the
/// pose is degenerate).
ViewpointDecision observe(const ViewpointSphere& sphere, const RigidTransform& pose);

ViewpointSphere mark_occupied(ViewpointSphere sphere, int index);

struct FusionParams {
    int cap = 30000;          // accumulated measured-cloud cap (FPS downsample)
    SorParams sor;
    ReconParams recon;
    /// Measured points whose nearest prior point is farther than this are
    /// appended instead of replacing (infinity = replace-only).
    double append_threshold = std::numeric_limits<double>::infinity();
};

struct FusionState {
    ColoredPointCloud prior_cloud;          // object frame, dense prior sampling
    ColoredPointCloud accumulated_measured; // object frame
    std::vector<std::uint8_t> replaced_flags;
    ColoredPointCloud appended;             // only grows in append mode
    TriangleMesh current_mesh;
    int keyframe_count = 0;
};

/// Seeds the state from a surface sampling of the (metric) prior mesh and an
/// initial reconstruction of it.
FusionState init_fusion(const TriangleMesh& prior_mesh_metric, int prior_samples,
                        const ReconParams& recon, std::uint64_t seed);

/// Two-step measurement-guided update. Step one: backproject the frame,
/// SOR-denoise, estimate camera-oriented normals, transform into the object
/// frame with `pose`, append to the accumulated cloud and FPS-cap it. Step
/// two: match every accumulated point to its nearest prior point (KD-tree
/// over the current prior positions) and replace that prior point's
/// position, color and normal with the closest measured match; then rebuild
/// current_mesh with poisson_reconstruct over the updated prior (plus
/// appended points in append mode). The input state is returned unchanged on
/// error.
FusionState fuse_keyframe(const FusionState& state, const Frame& frame, const PoseEstimate& pose,
                          const FusionParams& params);

} // namespace trackfuse
