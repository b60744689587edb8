#pragma once

#include <string>

#include "trackfuse/camera.hpp"
#include "trackfuse/icp.hpp"
#include "trackfuse/sor.hpp"

namespace trackfuse {

/// Swappable pose refiner boundary: given the measured camera-frame cloud,
/// the current reference mesh and an initial object-to-camera pose, produce
/// a refined estimate. The default implementation is ICP (refine_pose).
class PoseRefiner {
public:
    virtual ~PoseRefiner() = default;
    virtual PoseEstimate refine(const ColoredPointCloud& measured_camera_frame,
                                const TriangleMesh& reference_mesh, const RigidTransform& init,
                                const IcpParams& params) const = 0;
};

class IcpRefiner final : public PoseRefiner {
public:
    PoseEstimate refine(const ColoredPointCloud& measured, const TriangleMesh& reference_mesh,
                        const RigidTransform& init, const IcpParams& params) const override;
};

/// External refiner executable, mirroring the prior-adapter protocol: the
/// command receives {"frame_dir": ..., "init_pose": 4x4} on stdin and must
/// print a 4x4 row-major pose as JSON. The frame is staged as a single-frame
/// directory (index 0) under a scratch dir before each call.
class CommandRefiner final : public PoseRefiner {
public:
    CommandRefiner(std::string command, std::string scratch_dir);
    PoseEstimate refine(const ColoredPointCloud& measured, const TriangleMesh& reference_mesh,
                        const RigidTransform& init, const IcpParams& params) const override;

    /// Staging requires the raw frame; track() routes it here before refine.
    void stage_frame(const Frame& frame) const;

private:
    std::string command_;
    std::string scratch_dir_;
};

/// One tracking step: backproject the frame, SOR-denoise, subsample, and
/// refine starting from the previous pose against a fresh surface sampling
/// of the reference mesh. Failures (empty mask, starvation) return the
/// previous pose with converged = false instead of throwing.
PoseEstimate track(const Frame& frame, const PoseEstimate& previous,
                   const TriangleMesh& reference_mesh, const IcpParams& params,
                   const SorParams& sor, const PoseRefiner* refiner = nullptr);

} // namespace trackfuse
