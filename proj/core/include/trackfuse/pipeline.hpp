#pragma once

#include <string>

#include "trackfuse/config.hpp"
#include "trackfuse/metrics.hpp"

namespace trackfuse {

struct PipelineResult {
    EvalReport report;
    TriangleMesh final_mesh;
    int frames_processed = 0;
};

/// Full loop over a frame-directory dataset: prior generation and scale
/// recovery on frame 0, first-frame alignment (defines the object frame),
/// per-frame tracking, viewpoint-sphere keyframe detection and fusion.
/// Writes report.json, report.csv and final.ply into out_dir (plus
/// fused_%03d.ply snapshots when configured). Pose/CD evaluation requires
/// ground-truth poses and, in oracle mode, gt_mesh.ply in the dataset dir;
/// without them the metric fields are set to -1.
PipelineResult run_pipeline(const std::string& dataset_dir, const PipelineConfig& config,
                            const std::string& out_dir);

struct AblateEntry {
    int sphere_viewpoints = 0;
    int fps_cap = 0;
    int update_count = 0;
    double final_cd_e3 = 0;
    double max_update_ms = 0;
    double mean_track_ms = 0;
    double auc_add = 0;
    double auc_adds = 0;
};

/// Config sweeps over the viewpoint-count and point-cap axes; every entry is
/// a full pipeline run. Results land in out_dir/ablate.json.
std::vector<AblateEntry> run_ablation(const std::string& dataset_dir, const PipelineConfig& base,
                                      const std::vector<int>& viewpoint_axis,
                                      const std::vector<int>& cap_axis, const std::string& out_dir);

void write_ablation_json(const std::string& path, const std::vector<AblateEntry>& entries);
std::vector<AblateEntry> read_ablation_json(const std::string& path);

} // namespace trackfuse
