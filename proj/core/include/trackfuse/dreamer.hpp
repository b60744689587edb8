#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "trackfuse/camera.hpp"
#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

/// Canonical prior-mesh view: camera on the +z axis at this multiple of the
/// mesh's max OBB side, looking along -z at the centroid.
inline constexpr double kCanonicalViewDistanceFactor = 2.5;

/// Rotation part of the canonical view's object-to-camera pose. A prior in
/// the canonical frame appears in the first camera under exactly this
/// rotation, which is what makes rotation-free first-frame alignment valid.
inline Mat3 canonical_view_rotation() {
    Mat3 r = Mat3::Identity();
    r(1, 1) = -1;
    r(2, 2) = -1;
    return r;
}

struct CorruptionParams {
    /// Displacement amplitude (meters) for vertices hidden from the first
    /// view; unset means 0.05 x the object's max OBB side.
    std::optional<double> hidden_geom_noise;
    double hidden_color_shift = 0.2;
    bool normalize_scale = true;
    std::uint64_t rng_seed = 0;
};

/// synth_prior output. The mesh lives in the canonical dreamer frame:
/// centroid at the origin, the first view mapped onto the +z axis looking
/// down -z. canonical = (gt_to_canonical o gt) / normalization.
struct PriorResult {
    TriangleMesh mesh;
    RigidTransform gt_to_canonical;
    double normalization = 1.0;
};

/// Emulates a single-glance image-to-mesh model: vertices visible from
/// `first_view` (front-facing and unoccluded under ray casting) are
/// preserved; hidden vertices are displaced along their normals by smooth
/// 3-octave value noise and their colors shifted. Deterministic given
/// params.rng_seed.
PriorResult synth_prior(const TriangleMesh& gt_mesh, const RigidTransform& first_view_camera_to_world,
                        const CorruptionParams& params);

/// Ray-cast depth of the prior from its canonical first view, backprojected
/// into a camera-frame partial cloud (the estimated-depth analog used for
/// scale recovery). Throws NumericError if no rays hit.
ColoredPointCloud first_view_partial(const TriangleMesh& prior_mesh,
                                     const CameraIntrinsics& intrinsics);

enum class AdapterMode { directory, command };

/// Directory mode: read `prior.ply` from the adapter path. Command mode: run
/// the adapter with request_dir as its argument and read `prior.ply` from
/// request_dir afterwards. Missing file, malformed PLY and nonzero adapter
/// exit raise ConfigError, ParseError and AdapterError respectively.
TriangleMesh external_prior(const std::string& request_dir, const std::string& adapter,
                            AdapterMode mode);

} // namespace trackfuse
