#include "trackfuse/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "trackfuse/errors.hpp"
#include "trackfuse/frame_io.hpp"
#include "trackfuse/fusion.hpp"
#include "trackfuse/kdtree.hpp"
#include "trackfuse/mesh_sampling.hpp"
#include "trackfuse/obb.hpp"
#include "trackfuse/ply_io.hpp"
#include "trackfuse/tracker.hpp"

namespace trackfuse {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Similarity mapping ground-truth-frame points into the metric object
/// frame: x -> rigid(x) / scale.
struct GtAlignment {
    RigidTransform rigid;
    double scale = 1.0;
    Vec3 apply(const Vec3& x) const { return rigid.apply(x) / scale; }
};

struct EvalContext {
    bool available = false;
    TriangleMesh gt_mesh;             // ground-truth frame
    std::vector<Vec3> model_points;   // ground-truth frame
    std::vector<Vec3> gt_samples;     // dense, for CD; ground-truth frame
    GtAlignment alignment;

    std::vector<Vec3> aligned_model;  // model points mapped into the object frame
    std::vector<Vec3> aligned_gt_samples;

    void finalize() {
        aligned_model.resize(model_points.size());
        for (std::size_t i = 0; i < model_points.size(); ++i)
            aligned_model[i] = alignment.apply(model_points[i]);
        aligned_gt_samples.resize(gt_samples.size());
        for (std::size_t i = 0; i < gt_samples.size(); ++i)
            aligned_gt_samples[i] = alignment.apply(gt_samples[i]);
    }

    std::pair<double, double> pose_errors(const RigidTransform& est, const Mat4& gt_pose) const {
        const RigidTransform gt = RigidTransform::from_matrix(gt_pose);
        std::vector<Vec3> est_points(aligned_model.size());
        std::vector<Vec3> gt_points(aligned_model.size());
        for (std::size_t i = 0; i < aligned_model.size(); ++i) {
            est_points[i] = est.apply(aligned_model[i]);
            gt_points[i] = gt.apply(model_points[i]);
        }
        double add = 0;
        for (std::size_t i = 0; i < est_points.size(); ++i)
            add += (est_points[i] - gt_points[i]).norm();
        add /= static_cast<double>(est_points.size());

        const KdTree tree(std::move(gt_points));
        double adds = 0;
        for (const Vec3& p : est_points) adds += tree.nearest(p).second;
        adds /= static_cast<double>(est_points.size());
        return {add, adds};
    }

    double mesh_cd(const TriangleMesh& mesh) const {
        const ColoredPointCloud samples = sample_mesh_surface(mesh, 30000, /*seed=*/23);
        return chamfer_points(aligned_gt_samples, samples.positions, /*normalize=*/true);
    }
};

std::string snapshot_name(const std::string& out_dir, int keyframe) {
    char name[32];
    std::snprintf(name, sizeof(name), "fused_%03d.ply", keyframe);
    return out_dir + "/" + name;
}

} // namespace

PipelineResult run_pipeline(const std::string& dataset_dir, const PipelineConfig& config,
                            const std::string& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);

    const DatasetMeta meta = read_meta(dataset_dir);
    if (meta.frames.empty()) throw ConfigError("dataset: no frames listed in meta.json");
    const bool have_gt_poses = meta.has_ground_truth();

    // ---- frame 0: prior mesh, scale recovery, first alignment ----
    const auto prior_start = Clock::now();
    const Frame frame0 = read_frame(dataset_dir, meta.frames[0].index, meta.intrinsics);
    const ColoredPointCloud measured0_raw = backproject(frame0);
    if (static_cast<int>(measured0_raw.size()) <= config.sor.n_neighbors)
        throw ConfigError("pipeline: first frame has too few valid object pixels");

    EvalContext eval;
    TriangleMesh prior_mesh;
    if (config.dreamer.mode == "oracle") {
        const std::string gt_path = dataset_dir + "/gt_mesh.ply";
        if (!std::filesystem::exists(gt_path))
            throw ConfigError("pipeline: oracle dreamer needs " + gt_path);
        if (!meta.frames[0].gt_pose)
            throw ConfigError("pipeline: oracle dreamer needs a gt_pose for frame 0");
        eval.gt_mesh = read_ply(gt_path).to_mesh();

        const RigidTransform first_view =
            invert(RigidTransform::from_matrix(*meta.frames[0].gt_pose)); // camera-to-world
        const PriorResult prior = synth_prior(eval.gt_mesh, first_view, config.dreamer.corruption);
        prior_mesh = prior.mesh;
        eval.alignment.rigid = prior.gt_to_canonical;
        eval.alignment.scale = prior.normalization;
        eval.available = have_gt_poses;
    } else {
        const std::string request_dir = out_dir + "/dreamer_request";
        std::filesystem::create_directories(request_dir);
        write_frame(request_dir, 0, frame0);
        DatasetMeta request_meta;
        request_meta.intrinsics = meta.intrinsics;
        request_meta.frames.push_back({0, std::nullopt});
        write_meta(request_dir, request_meta);
        const AdapterMode mode = std::filesystem::is_directory(config.dreamer.adapter)
                                     ? AdapterMode::directory
                                     : AdapterMode::command;
        prior_mesh = external_prior(request_dir, config.dreamer.adapter, mode);
    }

    const ColoredPointCloud estimated_partial = first_view_partial(prior_mesh, meta.intrinsics);
    const double scale = recover_scale(measured0_raw, estimated_partial, config.sor);
    const TriangleMesh metric_prior = apply_scale(prior_mesh, scale);
    eval.alignment.scale *= scale;

    const ColoredPointCloud measured0 = sor_filter(measured0_raw, config.sor).kept;
    PoseEstimate pose = init_pose(measured0, metric_prior, config.icp);
    if (!pose.converged)
        std::cerr << "pipeline: warning: first-frame alignment did not converge\n";

    ViewpointSphere sphere = make_sphere(config.sphere_viewpoints, pose.object_to_camera);

    FusionState state =
        init_fusion(metric_prior, config.dreamer.prior_samples, config.recon, config.rng_seed);
    FusionParams fusion_params;
    fusion_params.cap = config.fps_cap;
    fusion_params.sor = config.sor;
    fusion_params.recon = config.recon;
    fusion_params.append_threshold = config.append_threshold;

    EvalReport report;
    report.stages.prior_ms = ms_since(prior_start);

    if (eval.available) {
        eval.model_points = sample_mesh_surface(eval.gt_mesh, 2048, /*seed=*/7).positions;
        eval.gt_samples = sample_mesh_surface(eval.gt_mesh, 30000, /*seed=*/11).positions;
        eval.finalize();
        report.keyframe_cd_e3.push_back(eval.mesh_cd(state.current_mesh));
    }

    std::unique_ptr<CommandRefiner> refiner;
    if (!config.refiner_command.empty())
        refiner = std::make_unique<CommandRefiner>(config.refiner_command, out_dir + "/refiner");

    // ---- main loop ----
    double track_total_ms = 0;
    std::vector<double> add_errors, adds_errors;
    for (std::size_t fi = 0; fi < meta.frames.size(); ++fi) {
        const int index = meta.frames[fi].index;
        const Frame frame = fi == 0 ? frame0 : read_frame(dataset_dir, index, meta.intrinsics);

        const auto track_start = Clock::now();
        if (fi > 0) {
            pose = track(frame, pose, state.current_mesh, config.icp, config.sor, refiner.get());
            if (!pose.converged)
                std::cerr << "pipeline: frame " << index << ": tracking did not converge, coasting\n";
        }
        const double track_ms = ms_since(track_start);
        track_total_ms += track_ms;

        FrameRecord record;
        record.frame = index;
        record.time_ms = track_ms;
        if (eval.available && meta.frames[fi].gt_pose) {
            const auto [add, adds] =
                eval.pose_errors(pose.object_to_camera, *meta.frames[fi].gt_pose);
            record.add_m = add;
            record.adds_m = adds;
            add_errors.push_back(add);
            adds_errors.push_back(adds);
        } else {
            record.add_m = -1;
            record.adds_m = -1;
        }
        report.per_frame.push_back(record);

        if (pose.converged) {
            const ViewpointDecision decision = observe(sphere, pose.object_to_camera);
            if (decision.trigger) {
                const auto fuse_start = Clock::now();
                try {
                    state = fuse_keyframe(state, frame, pose, fusion_params);
                    sphere = mark_occupied(sphere, decision.viewpoint_index);
                    const double fuse_ms = ms_since(fuse_start);
                    report.mesh_update_times_ms.push_back(fuse_ms);
                    report.stages.fuse_total_ms += fuse_ms;
                    ++report.update_count;
                    if (eval.available)
                        report.keyframe_cd_e3.push_back(eval.mesh_cd(state.current_mesh));
                    if (config.snapshot_every_keyframe)
                        write_ply(snapshot_name(out_dir, state.keyframe_count), state.current_mesh);
                } catch (const Error& e) {
                    std::cerr << "pipeline: frame " << index << ": fusion failed: " << e.what()
                              << "\n";
                }
            }
        }
    }

    report.stages.track_mean_ms =
        track_total_ms / static_cast<double>(std::max<std::size_t>(1, meta.frames.size()));
    if (eval.available && !add_errors.empty()) {
        report.auc_add = auc(add_errors, 0.1);
        report.auc_adds = auc(adds_errors, 0.1);
        report.chamfer_e3 = eval.mesh_cd(state.current_mesh);
    } else {
        report.auc_add = -1;
        report.auc_adds = -1;
        report.chamfer_e3 = -1;
    }

    write_ply(out_dir + "/final.ply", state.current_mesh);
    write_report_json(out_dir + "/report.json", report);
    write_report_csv(out_dir + "/report.csv", report);

    PipelineResult result;
    result.report = std::move(report);
    result.final_mesh = std::move(state.current_mesh);
    result.frames_processed = static_cast<int>(meta.frames.size());
    return result;
}

std::vector<AblateEntry> run_ablation(const std::string& dataset_dir, const PipelineConfig& base,
                                      const std::vector<int>& viewpoint_axis,
                                      const std::vector<int>& cap_axis, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<AblateEntry> entries;

    auto run_one = [&](int viewpoints, int cap, const std::string& tag) {
        PipelineConfig config = base;
        config.sphere_viewpoints = viewpoints;
        config.fps_cap = cap;
        const PipelineResult result = run_pipeline(dataset_dir, config, out_dir + "/" + tag);
        AblateEntry entry;
        entry.sphere_viewpoints = viewpoints;
        entry.fps_cap = cap;
        entry.update_count = result.report.update_count;
        entry.final_cd_e3 = result.report.chamfer_e3;
        entry.mean_track_ms = result.report.stages.track_mean_ms;
        entry.auc_add = result.report.auc_add;
        entry.auc_adds = result.report.auc_adds;
        for (double t : result.report.mesh_update_times_ms)
            entry.max_update_ms = std::max(entry.max_update_ms, t);
        entries.push_back(entry);
    };

    for (int n : viewpoint_axis) run_one(n, base.fps_cap, "viewpoints_" + std::to_string(n));
    for (int cap : cap_axis) run_one(base.sphere_viewpoints, cap, "cap_" + std::to_string(cap));

    write_ablation_json(out_dir + "/ablate.json", entries);
    return entries;
}

void write_ablation_json(const std::string& path, const std::vector<AblateEntry>& entries) {
    nlohmann::json j = nlohmann::json::array();
    for (const AblateEntry& e : entries) {
        j.push_back({{"sphere_viewpoints", e.sphere_viewpoints},
                     {"fps_cap", e.fps_cap},
                     {"update_count", e.update_count},
                     {"final_cd_e3", e.final_cd_e3},
                     {"max_update_ms", e.max_update_ms},
                     {"mean_track_ms", e.mean_track_ms},
                     {"auc_add", e.auc_add},
                     {"auc_adds", e.auc_adds}});
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("ablate: cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

std::vector<AblateEntry> read_ablation_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("ablate: missing " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("ablate: invalid " + path + ": " + e.what());
    }
    std::vector<AblateEntry> entries;
    for (const nlohmann::json& je : j) {
        AblateEntry e;
        e.sphere_viewpoints = je.at("sphere_viewpoints").get<int>();
        e.fps_cap = je.at("fps_cap").get<int>();
        e.update_count = je.at("update_count").get<int>();
        e.final_cd_e3 = je.at("final_cd_e3").get<double>();
        e.max_update_ms = je.at("max_update_ms").get<double>();
        e.mean_track_ms = je.at("mean_track_ms").get<double>();
        e.auc_add = je.at("auc_add").get<double>();
        e.auc_adds = je.at("auc_adds").get<double>();
        entries.push_back(e);
    }
    return entries;
}

} // namespace trackfuse
