#include "trackfuse/tracker.hpp"

#include <filesystem>

#include <json.hpp>

#include "trackfuse/errors.hpp"
#include "trackfuse/frame_io.hpp"
#include "trackfuse/mesh_sampling.hpp"
#include "trackfuse/process.hpp"
#include "trackfuse/rng.hpp"

namespace trackfuse {

using nlohmann::json;

PoseEstimate IcpRefiner::refine(const ColoredPointCloud& measured, const TriangleMesh& reference_mesh,
                                const RigidTransform& init, const IcpParams& params) const {
    const std::uint64_t seed = hash_combine(0x5ef1ebu, reference_mesh.vertices.size());
    const ColoredPointCloud reference =
        sample_mesh_surface(reference_mesh, params.reference_samples, seed);
    return refine_pose(measured, reference, init, params);
}

CommandRefiner::CommandRefiner(std::string command, std::string scratch_dir)
    : command_(std::move(command)), scratch_dir_(std::move(scratch_dir)) {}

void CommandRefiner::stage_frame(const Frame& frame) const {
    std::filesystem::create_directories(scratch_dir_ + "/frame");
    write_frame(scratch_dir_ + "/frame", 0, frame);
    DatasetMeta meta;
    meta.intrinsics = frame.intrinsics;
    FrameMeta fm;
    fm.index = 0;
    meta.frames.push_back(fm);
    write_meta(scratch_dir_ + "/frame", meta);
}

PoseEstimate CommandRefiner::refine(const ColoredPointCloud& measured,
                                    const TriangleMesh& reference_mesh, const RigidTransform& init,
                                    const IcpParams& params) const {
    (void)measured;
    (void)reference_mesh;
    (void)params;
    json request;
    request["frame_dir"] = scratch_dir_ + "/frame";
    json pose_rows = json::array();
    const Mat4 m = init.matrix();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
        pose_rows.push_back(row);
    }
    request["init_pose"] = pose_rows;

    const ProcessResult result = run_command(command_, request.dump(), scratch_dir_);
    if (result.exit_code != 0)
        throw AdapterError("refiner adapter failed", result.exit_code, result.error);

    json reply;
    try {
        reply = json::parse(result.output);
    } catch (const json::exception& e) {
        throw AdapterError(std::string("refiner adapter printed invalid JSON: ") + e.what(),
                           result.exit_code, result.output);
    }
    const json& rows = reply.is_object() && reply.contains("pose") ? reply["pose"] : reply;
    if (!rows.is_array() || rows.size() != 4)
        throw AdapterError("refiner adapter must print a 4x4 pose", result.exit_code, result.output);
    Mat4 out;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) out(r, c) = rows[r][c].get<double>();
    }
    PoseEstimate estimate;
    estimate.object_to_camera = RigidTransform::from_matrix(out);
    if (orthonormality_drift(estimate.object_to_camera.rotation) > 1e-6)
        throw AdapterError("refiner adapter returned a non-rigid rotation", result.exit_code,
                           result.output);
    estimate.object_to_camera.rotation = orthonormalize(estimate.object_to_camera.rotation);
    estimate.converged = true;
    return estimate;
}

namespace {

ColoredPointCloud stride_subsample(const ColoredPointCloud& cloud, int cap) {
    const int n = static_cast<int>(cloud.size());
    if (cap <= 0 || n <= cap) return cloud;
    std::vector<int> indices;
    indices.reserve(cap);
    // evenly spaced fixed-point stride keeps selection deterministic
    const double step = static_cast<double>(n) / cap;
    for (int i = 0; i < cap; ++i) indices.push_back(static_cast<int>(i * step));
    return cloud.select(indices);
}

} // namespace

PoseEstimate track(const Frame& frame, const PoseEstimate& previous,
                   const TriangleMesh& reference_mesh, const IcpParams& params,
                   const SorParams& sor, const PoseRefiner* refiner) {
    PoseEstimate coast = previous;
    coast.converged = false;
    coast.iterations_used = 0;

    ColoredPointCloud cloud = backproject(frame);
    if (static_cast<int>(cloud.size()) <= sor.n_neighbors) return coast;
    cloud = sor_filter(cloud, sor).kept;
    if (cloud.size() < 6) return coast;
    cloud = stride_subsample(cloud, params.measured_samples);

    static const IcpRefiner default_refiner;
    const PoseRefiner* active = refiner ? refiner : &default_refiner;
    if (const auto* command = dynamic_cast<const CommandRefiner*>(active)) command->stage_frame(frame);

    try {
        return active->refine(cloud, reference_mesh, previous.object_to_camera, params);
    } catch (const NumericError&) {
        return coast;
    }
}

} // namespace trackfuse
