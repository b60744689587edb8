#include "trackfuse/fusion.hpp"

#include <cmath>

#include "trackfuse/errors.hpp"
#include "trackfuse/fps.hpp"
#include "trackfuse/kdtree.hpp"
#include "trackfuse/mesh_sampling.hpp"
#include "trackfuse/parallel.hpp"

namespace trackfuse {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ViewpointSphere make_sphere(int n, const RigidTransform& anchor) {
    if (n < 1) throw InvalidInput("make_sphere: n must be >= 1");
    ViewpointSphere sphere;
    sphere.anchor = anchor;
    sphere.directions.reserve(n);
    // offset Fibonacci lattice (no poles, near-uniform spacing)
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = n == 1 ? 1.0 : 1.0 - 2.0 * (i + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * i;
        sphere.directions.emplace_back(r * std::cos(a), r * std::sin(a), z);
    }
    sphere.occupied.assign(n, 0);

    double min_sep = kPi;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            min_sep = std::min(min_sep, angle_between(sphere.directions[i], sphere.directions[j]));
        }
    }
    sphere.tolerance_rad = n == 1 ? kPi : 0.5 * min_sep;

    // the first frame is aligned with (occupies) its nearest viewpoint
    const Vec3 dir = viewing_direction(anchor);
    int nearest = 0;
    double best = angle_between(sphere.directions[0], dir);
    for (int i = 1; i < n; ++i) {
        const double a = angle_between(sphere.directions[i], dir);
        if (a < best) {
            best = a;
            nearest = i;
        }
    }
    sphere.occupied[nearest] = 1;
    return sphere;
}

Vec3 viewing_direction(const RigidTransform& object_to_camera) {
    const Vec3 camera_center = invert(object_to_camera).translation;
    const double norm = camera_center.norm();
    if (norm < 1e-12) throw InvalidInput("viewing_direction: camera at the object origin");
    return camera_center / norm;
}

ViewpointDecision observe(const ViewpointSphere& sphere, const RigidTransform& pose) {
    ViewpointDecision decision;
    const Vec3 dir = viewing_direction(pose);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sphere.size(); ++i) {
        const double a = angle_between(sphere.directions[i], dir);
        if (a < best) {
            best = a;
            decision.viewpoint_index = i;
        }
    }
    decision.trigger = decision.viewpoint_index >= 0 &&
                       !sphere.occupied[decision.viewpoint_index] && best <= sphere.tolerance_rad;
    return decision;
}

ViewpointSphere mark_occupied(ViewpointSphere sphere, int index) {
    if (index < 0 || index >= sphere.size()) throw InvalidInput("mark_occupied: bad index");
    sphere.occupied[index] = 1;
    return sphere;
}

FusionState init_fusion(const TriangleMesh& prior_mesh_metric, int prior_samples,
                        const ReconParams& recon, std::uint64_t seed) {
    FusionState state;
    state.prior_cloud = sample_mesh_surface(prior_mesh_metric, prior_samples, seed);
    state.replaced_flags.assign(state.prior_cloud.size(), 0);
    state.current_mesh = poisson_reconstruct(state.prior_cloud, recon);
    return state;
}

FusionState fuse_keyframe(const FusionState& state, const Frame& frame, const PoseEstimate& pose,
                          const FusionParams& params) {
    if (!pose.converged) throw InvalidInput("fuse_keyframe: pose estimate not converged");
    if (state.prior_cloud.empty()) throw InvalidInput("fuse_keyframe: uninitialized state");

    // step one: measure, denoise, orient, register into the object frame
    ColoredPointCloud measured = backproject(frame);
    if (static_cast<int>(measured.size()) <= params.sor.n_neighbors)
        throw NumericError("fuse_keyframe: too few measured points");
    measured = sor_filter(measured, params.sor).kept;
    if (static_cast<int>(measured.size()) <= params.recon.normal_k)
        throw NumericError("fuse_keyframe: too few measured points after SOR");
    measured = estimate_normals(measured, params.recon.normal_k, Vec3::Zero()); // camera at origin
    measured = transform_cloud(measured, invert(pose.object_to_camera));

    FusionState next = state;
    ColoredPointCloud& accumulated = next.accumulated_measured;
    accumulated.positions.insert(accumulated.positions.end(), measured.positions.begin(),
                                 measured.positions.end());
    accumulated.colors.insert(accumulated.colors.end(), measured.colors.begin(),
                              measured.colors.end());
    accumulated.normals.insert(accumulated.normals.end(), measured.normals.begin(),
                               measured.normals.end());
    if (static_cast<int>(accumulated.size()) > params.cap)
        accumulated = accumulated.select(fps(accumulated, params.cap));

    // step two: nearest-prior replacement, closest measured point wins
    const KdTree prior_tree(next.prior_cloud.positions);
    const std::size_t n = accumulated.size();
    std::vector<int> nearest_prior(n);
    std::vector<double> nearest_dist(n);
    parallel_for_chunks(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto [idx, d] = prior_tree.nearest(accumulated.positions[i]);
            nearest_prior[i] = idx;
            nearest_dist[i] = d;
        }
    });

    std::vector<int> winner(next.prior_cloud.size(), -1);
    std::vector<int> appended_indices;
    for (std::size_t i = 0; i < n; ++i) {
        if (nearest_dist[i] > params.append_threshold) {
            appended_indices.push_back(static_cast<int>(i));
            continue;
        }
        const int prior = nearest_prior[i];
        const int current = winner[prior];
        if (current < 0 || nearest_dist[i] < nearest_dist[current] ||
            (nearest_dist[i] == nearest_dist[current] && static_cast<int>(i) < current)) {
            winner[prior] = static_cast<int>(i);
        }
    }
    for (std::size_t prior = 0; prior < winner.size(); ++prior) {
        const int i = winner[prior];
        if (i < 0) continue;
        next.prior_cloud.positions[prior] = accumulated.positions[i];
        next.prior_cloud.colors[prior] = accumulated.colors[i];
        if (next.prior_cloud.has_normals() && accumulated.has_normals())
            next.prior_cloud.normals[prior] = accumulated.normals[i];
        next.replaced_flags[prior] = 1;
    }
    if (!appended_indices.empty()) {
        const ColoredPointCloud extra = accumulated.select(appended_indices);
        next.appended.positions.insert(next.appended.positions.end(), extra.positions.begin(),
                                       extra.positions.end());
        next.appended.colors.insert(next.appended.colors.end(), extra.colors.begin(),
                                    extra.colors.end());
        next.appended.normals.insert(next.appended.normals.end(), extra.normals.begin(),
                                     extra.normals.end());
    }

    ColoredPointCloud fused = next.prior_cloud;
    if (!next.appended.empty()) {
        fused.positions.insert(fused.positions.end(), next.appended.positions.begin(),
                               next.appended.positions.end());
        fused.colors.insert(fused.colors.end(), next.appended.colors.begin(),
                            next.appended.colors.end());
        fused.normals.insert(fused.normals.end(), next.appended.normals.begin(),
                             next.appended.normals.end());
    }
    next.current_mesh = poisson_reconstruct(fused, params.recon);
    next.keyframe_count = state.keyframe_count + 1;
    return next;
}

} // namespace trackfuse
