#include "trackfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "trackfuse/errors.hpp"
#include "trackfuse/kdtree.hpp"
#include "trackfuse/mesh_sampling.hpp"
#include "trackfuse/parallel.hpp"

namespace trackfuse {

using nlohmann::json;

double add_metric(const std::vector<Vec3>& model_points, const RigidTransform& est,
                  const RigidTransform& gt) {
    if (model_points.empty()) throw InvalidInput("add_metric: empty model");
    double sum = 0;
    for (const Vec3& x : model_points) sum += (est.apply(x) - gt.apply(x)).norm();
    return sum / static_cast<double>(model_points.size());
}

double adds_metric(const std::vector<Vec3>& model_points, const RigidTransform& est,
                   const RigidTransform& gt) {
    if (model_points.empty()) throw InvalidInput("adds_metric: empty model");
    std::vector<Vec3> gt_points(model_points.size());
    for (std::size_t i = 0; i < model_points.size(); ++i) gt_points[i] = gt.apply(model_points[i]);
    const KdTree tree(std::move(gt_points));

    std::vector<double> nearest(model_points.size());
    parallel_for_chunks(model_points.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            nearest[i] = tree.nearest(est.apply(model_points[i])).second;
    });
    double sum = 0;
    for (double d : nearest) sum += d;
    return sum / static_cast<double>(model_points.size());
}

double auc(const std::vector<double>& errors, double max_threshold) {
    if (errors.empty()) throw InvalidInput("auc: empty error list");
    if (!(max_threshold > 0)) throw InvalidInput("auc: max_threshold must be positive");
    double area = 0;
    for (double e : errors) {
        if (e < 0) throw InvalidInput("auc: negative error");
        area += std::max(0.0, max_threshold - e);
    }
    return area / (static_cast<double>(errors.size()) * max_threshold);
}

namespace {

double one_sided_mean_sq(const std::vector<Vec3>& from, const KdTree& to_tree) {
    std::vector<double> d(from.size());
    parallel_for_chunks(from.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) d[i] = to_tree.nearest(from[i]).second;
    });
    double sum = 0;
    for (double v : d) sum += v * v;
    return sum / static_cast<double>(from.size());
}

} // namespace

double chamfer_points(const std::vector<Vec3>& reference, const std::vector<Vec3>& other,
                      bool normalize) {
    if (reference.empty() || other.empty()) throw InvalidInput("chamfer: empty cloud");

    std::vector<Vec3> a = reference, b = other;
    if (normalize) {
        const Vec3 center = centroid(a);
        double radius = 0;
        for (const Vec3& p : a) radius = std::max(radius, (p - center).norm());
        if (radius <= 0) throw NumericError("chamfer: reference cloud has zero radius");
        for (Vec3& p : a) p = (p - center) / radius;
        for (Vec3& p : b) p = (p - center) / radius;
    }

    const KdTree tree_a(a);
    const KdTree tree_b(b);
    const double cd = one_sided_mean_sq(a, tree_b) + one_sided_mean_sq(b, tree_a);
    return cd * 1e3;
}

double chamfer(const ColoredPointCloud& reference, const ColoredPointCloud& other, bool normalize) {
    return chamfer_points(reference.positions, other.positions, normalize);
}

double chamfer_meshes(const TriangleMesh& reference, const TriangleMesh& other, bool normalize,
                      int samples) {
    const ColoredPointCloud a = sample_mesh_surface(reference, samples, /*seed=*/17);
    const ColoredPointCloud b = sample_mesh_surface(other, samples, /*seed=*/23);
    return chamfer_points(a.positions, b.positions, normalize);
}

void write_report_json(const std::string& path, const EvalReport& report) {
    json j;
    json frames = json::array();
    for (const FrameRecord& f : report.per_frame) {
        frames.push_back({{"frame", f.frame},
                          {"add_m", f.add_m},
                          {"adds_m", f.adds_m},
                          {"time_ms", f.time_ms}});
    }
    j["per_frame"] = frames;
    j["auc_add"] = report.auc_add;
    j["auc_adds"] = report.auc_adds;
    j["chamfer_e3"] = report.chamfer_e3;
    j["keyframe_cd_e3"] = report.keyframe_cd_e3;
    j["mesh_update_times_ms"] = report.mesh_update_times_ms;
    j["update_count"] = report.update_count;
    j["stage_times_ms"] = {{"prior", report.stages.prior_ms},
                           {"track_mean", report.stages.track_mean_ms},
                           {"fuse_total", report.stages.fuse_total_ms}};

    std::ofstream out(path);
    if (!out) throw ConfigError("report: cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

EvalReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("report: missing " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("report: invalid " + path + ": " + e.what());
    }
    EvalReport report;
    try {
        for (const json& jf : j.at("per_frame")) {
            FrameRecord f;
            f.frame = jf.at("frame").get<int>();
            f.add_m = jf.at("add_m").get<double>();
            f.adds_m = jf.at("adds_m").get<double>();
            f.time_ms = jf.at("time_ms").get<double>();
            report.per_frame.push_back(f);
        }
        report.auc_add = j.at("auc_add").get<double>();
        report.auc_adds = j.at("auc_adds").get<double>();
        report.chamfer_e3 = j.at("chamfer_e3").get<double>();
        report.keyframe_cd_e3 = j.at("keyframe_cd_e3").get<std::vector<double>>();
        report.mesh_update_times_ms = j.at("mesh_update_times_ms").get<std::vector<double>>();
        report.update_count = j.at("update_count").get<int>();
        const json& st = j.at("stage_times_ms");
        report.stages.prior_ms = st.at("prior").get<double>();
        report.stages.track_mean_ms = st.at("track_mean").get<double>();
        report.stages.fuse_total_ms = st.at("fuse_total").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError("report: bad field in " + path + ": " + e.what());
    }
    return report;
}

void write_report_csv(const std::string& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out) throw ConfigError("report: cannot open " + path + " for writing");
    out << "frame,add_m,adds_m,time_ms\n";
    for (const FrameRecord& f : report.per_frame) {
        out << f.frame << "," << f.add_m << "," << f.adds_m << "," << f.time_ms << "\n";
    }
}

} // namespace trackfuse
