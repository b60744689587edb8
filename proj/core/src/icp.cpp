#include "trackfuse/icp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>

#include "trackfuse/dreamer.hpp"
#include "trackfuse/errors.hpp"
#include "trackfuse/kdtree.hpp"
#include "trackfuse/mesh_sampling.hpp"
#include "trackfuse/parallel.hpp"

namespace trackfuse {

RigidTransform kabsch(const std::vector<Vec3>& source, const std::vector<Vec3>& target) {
    if (source.size() != target.size() || source.size() < 3)
        throw InvalidInput("kabsch: need at least 3 paired points");

    const Vec3 sc = centroid(source);
    const Vec3 tc = centroid(target);
    Mat3 h = Mat3::Zero();
    for (std::size_t i = 0; i < source.size(); ++i)
        h += (source[i] - sc) * (target[i] - tc).transpose();

    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    Mat3 r = v * u.transpose();
    if (r.determinant() < 0) {
        u.col(2) *= -1.0;
        r = v * u.transpose();
    }
    RigidTransform t;
    t.rotation = r;
    t.translation = tc - r * sc;
    return t;
}

namespace {

struct Matches {
    std::vector<int> measured;  // indices into the measured cloud
    std::vector<int> reference; // matched reference indices
    double rms = 0;
};

Matches correspond(const std::vector<Vec3>& transformed, const KdTree& tree, double cutoff) {
    const std::size_t n = transformed.size();
    std::vector<int> match(n, -1);
    std::vector<double> dist(n, 0);
    parallel_for_chunks(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto [idx, d] = tree.nearest(transformed[i]);
            if (d <= cutoff) {
                match[i] = idx;
                dist[i] = d;
            }
        }
    });
    Matches m;
    double sq_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (match[i] < 0) continue;
        m.measured.push_back(static_cast<int>(i));
        m.reference.push_back(match[i]);
        sq_sum += dist[i] * dist[i];
    }
    if (!m.measured.empty()) m.rms = std::sqrt(sq_sum / static_cast<double>(m.measured.size()));
    return m;
}

// one linearized point-to-plane step on already-transformed source points
RigidTransform point_to_plane_step(const std::vector<Vec3>& transformed, const Matches& matches,
                                   const ColoredPointCloud& reference) {
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (std::size_t k = 0; k < matches.measured.size(); ++k) {
        const Vec3& p = transformed[matches.measured[k]];
        const Vec3& q = reference.positions[matches.reference[k]];
        const Vec3& n = reference.normals[matches.reference[k]];
        Eigen::Matrix<double, 6, 1> j;
        j.head<3>() = p.cross(n);
        j.tail<3>() = n;
        const double r = (p - q).dot(n);
        jtj += j * j.transpose();
        jtr += j * r;
    }
    jtj.diagonal().array() += 1e-12; // guards rank-deficient constellations
    const Eigen::Matrix<double, 6, 1> x = jtj.ldlt().solve(-jtr);
    RigidTransform delta;
    const Vec3 omega = x.head<3>();
    const double angle = omega.norm();
    if (angle > 0) delta.rotation = axis_angle(omega, angle);
    delta.translation = x.tail<3>();
    return delta;
}

} // namespace

PoseEstimate refine_pose(const ColoredPointCloud& measured, const ColoredPointCloud& reference,
                         const RigidTransform& init, const IcpParams& params) {
    if (measured.empty() || reference.empty())
        throw InvalidInput("refine_pose: empty input cloud");
    if (params.variant == IcpVariant::point_to_plane && !reference.has_normals())
        throw InvalidInput("refine_pose: point_to_plane needs reference normals");

    const KdTree tree(reference.positions);

    // solve in the object frame: x maps camera -> object
    RigidTransform x = invert(init);
    RigidTransform best_x = x;
    double best_rms = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;

    std::vector<Vec3> transformed(measured.size());
    std::vector<Vec3> previous(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i)
        transformed[i] = x.apply(measured.positions[i]);

    double previous_rms = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < params.max_iterations; ++iter) {
        iterations = iter + 1;
        const Matches matches = correspond(transformed, tree, params.correspondence_cutoff);
        if (static_cast<int>(matches.measured.size()) < 6)
            throw NumericError("refine_pose: fewer than 6 correspondences within cutoff");

        if (matches.rms < best_rms) {
            best_rms = matches.rms;
            best_x = x;
        }
        // residual stagnation counts as settled: planar scenes leave a
        // point-to-plane nullspace where point motion never dies out
        if (std::abs(previous_rms - matches.rms) < params.convergence_delta && iter > 0) {
            converged = true;
            break;
        }
        previous_rms = matches.rms;

        if (params.variant == IcpVariant::point_to_point) {
            std::vector<Vec3> src(matches.measured.size());
            std::vector<Vec3> dst(matches.measured.size());
            for (std::size_t k = 0; k < matches.measured.size(); ++k) {
                src[k] = measured.positions[matches.measured[k]];
                dst[k] = reference.positions[matches.reference[k]];
            }
            x = kabsch(src, dst);
        } else {
            const RigidTransform delta = point_to_plane_step(transformed, matches, reference);
            x = compose(delta, x);
        }

        previous.swap(transformed);
        double motion = 0;
        for (std::size_t i = 0; i < measured.size(); ++i) {
            transformed[i] = x.apply(measured.positions[i]);
            motion += (transformed[i] - previous[i]).norm();
        }
        motion /= static_cast<double>(measured.size());
        if (motion < params.convergence_delta) {
            converged = true;
            break;
        }
    }

    // final correspondences may beat the best seen so far
    const Matches final_matches = correspond(transformed, tree, params.correspondence_cutoff);
    if (static_cast<int>(final_matches.measured.size()) >= 6 && final_matches.rms < best_rms) {
        best_rms = final_matches.rms;
        best_x = x;
    }

    PoseEstimate estimate;
    estimate.object_to_camera = invert(best_x);
    estimate.residual_rms = best_rms;
    estimate.iterations_used = iterations;
    estimate.converged = converged;
    return estimate;
}

PoseEstimate init_pose(const ColoredPointCloud& first_cloud_camera_frame,
                       const TriangleMesh& prior_mesh_metric, const IcpParams& params) {
    if (first_cloud_camera_frame.empty()) throw InvalidInput("init_pose: empty measured cloud");
    const ColoredPointCloud reference =
        sample_mesh_surface(prior_mesh_metric, params.reference_samples, /*seed=*/0);

    // No rotation search: the prior's canonical view faces the first camera,
    // so the initial rotation is the fixed canonical-view rotation and only
    // the centroid offset is guessed.
    RigidTransform guess;
    guess.rotation = canonical_view_rotation();
    guess.translation = centroid(first_cloud_camera_frame.positions) -
                        guess.rotation * centroid(reference.positions);

    ColoredPointCloud measured = first_cloud_camera_frame;
    if (params.measured_samples > 0 &&
        static_cast<int>(measured.size()) > params.measured_samples) {
        std::vector<int> indices;
        indices.reserve(params.measured_samples);
        const double step = static_cast<double>(measured.size()) / params.measured_samples;
        for (int i = 0; i < params.measured_samples; ++i)
            indices.push_back(static_cast<int>(i * step));
        measured = measured.select(indices);
    }
    return refine_pose(measured, reference, guess, params);
}

} // namespace trackfuse
