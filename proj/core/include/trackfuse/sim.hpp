#pragma once

#include <cstdint>
#include <string>

#include "trackfuse/bvh.hpp"
#include "trackfuse/camera.hpp"
#include "trackfuse/frame_io.hpp"

namespace trackfuse {

enum class PrimitiveKind { box, cylinder, mug };

enum class ColorScheme { solid, axis_gradient, checker };

/// Watertight primitive meshes used as synthetic scan subjects. Boxes use
/// split vertices (24) so each side keeps a flat color; cylinder and mug are
/// welded closed surfaces. `dims`: box = full side lengths; cylinder =
/// (radius, height, unused); mug = (outer radius, height, handle radius).
TriangleMesh make_primitive(PrimitiveKind kind, const Vec3& dims,
                            ColorScheme scheme = ColorScheme::axis_gradient);

PrimitiveKind primitive_from_name(const std::string& name);

/// Camera poses (camera-to-world) evenly spaced on a horizontal circle of
/// `radius` at `height` above `center`, each looking at center with a +z up
/// hint. Pose 0 sits on the +x side.
std::vector<RigidTransform> ring_trajectory(const Vec3& center, double radius, double height,
                                            int n_frames);

/// Per-pixel closest-triangle depth (z in the camera frame), hit mask, and
/// barycentric-interpolated vertex color. `camera` is camera-to-world.
struct RenderResult {
    DepthImage depth;
    MaskImage mask;
    ColorImage color;
};
RenderResult ray_cast_depth(const Bvh& bvh, const RigidTransform& camera,
                            const CameraIntrinsics& intrinsics);
RenderResult ray_cast_depth(const TriangleMesh& mesh, const RigidTransform& camera,
                            const CameraIntrinsics& intrinsics);

struct NoiseModel {
    double gaussian_sigma = 0.0; // meters at 1 m depth, scales with depth^2
    double dropout_prob = 0.0;
    std::uint64_t rng_seed = 0;
};

/// Valid pixels perturbed by N(0, sigma*d^2) and dropped with dropout_prob.
/// The noise is keyed per pixel, so results do not depend on worker count.
DepthImage add_depth_noise(const DepthImage& depth, const NoiseModel& model);

/// Renders `trajectory` over `mesh` and writes the frame-directory format
/// (depth/color/mask per frame plus meta.json carrying the ground-truth
/// object-to-camera poses). Returns the number of frames written.
int write_dataset(const TriangleMesh& mesh, const std::vector<RigidTransform>& trajectory,
                  const CameraIntrinsics& intrinsics, const NoiseModel& noise,
                  const std::string& out_dir);

} // namespace trackfuse
