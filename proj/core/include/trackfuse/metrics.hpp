#pragma once

#include <string>

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

/// Mean distance between model points under the estimated and ground-truth
/// poses.
double add_metric(const std::vector<Vec3>& model_points, const RigidTransform& est,
                  const RigidTransform& gt);

/// Symmetry-tolerant variant: mean over est-posed points of the distance to
/// the nearest gt-posed point (exact, KD-tree accelerated).
double adds_metric(const std::vector<Vec3>& model_points, const RigidTransform& est,
                   const RigidTransform& gt);

/// Exact area under the accuracy-vs-threshold curve on [0, max_threshold],
/// normalized to [0,1]: each error e contributes max(0, T - e) / (n T).
double auc(const std::vector<double>& errors, double max_threshold);

/// Bidirectional squared-distance Chamfer, reported x 10^3. When `normalize`
/// is set both clouds are translated by the first (reference) cloud's
/// centroid and scaled by its max radius, i.e. the reference lands in the
/// unit sphere.
double chamfer_points(const std::vector<Vec3>& reference, const std::vector<Vec3>& other,
                      bool normalize);

double chamfer(const ColoredPointCloud& reference, const ColoredPointCloud& other, bool normalize);

/// Meshes are surface-sampled (default 30,000 points) before comparison.
double chamfer_meshes(const TriangleMesh& reference, const TriangleMesh& other, bool normalize,
                      int samples = 30000);

struct FrameRecord {
    int frame = 0;
    double add_m = 0;
    double adds_m = 0;
    double time_ms = 0;
};

struct StageTimes {
    double prior_ms = 0;      // dreamer + scale recovery + first alignment
    double track_mean_ms = 0; // per-frame tracking average
    double fuse_total_ms = 0; // all mesh updates
};

struct EvalReport {
    std::vector<FrameRecord> per_frame;
    double auc_add = 0;
    double auc_adds = 0;
    double chamfer_e3 = 0; // final mesh vs ground truth
    std::vector<double> keyframe_cd_e3;       // CD trajectory, index 0 = initial prior
    std::vector<double> mesh_update_times_ms; // one entry per keyframe fusion
    StageTimes stages;
    int update_count = 0;
};

void write_report_json(const std::string& path, const EvalReport& report);
EvalReport read_report_json(const std::string& path);

/// Fixed header: frame,add_m,adds_m,time_ms
void write_report_csv(const std::string& path, const EvalReport& report);

} // namespace trackfuse
