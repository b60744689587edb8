#include "trackfuse/dreamer.hpp"

#include <cmath>
#include <filesystem>

#include "trackfuse/bvh.hpp"
#include "trackfuse/errors.hpp"
#include "trackfuse/obb.hpp"
#include "trackfuse/ply_io.hpp"
#include "trackfuse/process.hpp"
#include "trackfuse/rng.hpp"
#include "trackfuse/sim.hpp"

namespace trackfuse {

namespace {

double fade(double t) { return t * t * (3.0 - 2.0 * t); }

double lattice_value(std::int64_t ix, std::int64_t iy, std::int64_t iz, std::uint64_t seed) {
    std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(ix) * 0x8da6b343ULL);
    h = hash_combine(h, static_cast<std::uint64_t>(iy) * 0xd8163841ULL);
    h = hash_combine(h, static_cast<std::uint64_t>(iz) * 0xcb1ab31fULL);
    return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

// single octave of trilinear value noise in [-1,1]
double value_noise(const Vec3& p, double wavelength, std::uint64_t seed) {
    const Vec3 u = p / wavelength;
    const Vec3 fl(std::floor(u.x()), std::floor(u.y()), std::floor(u.z()));
    const auto ix = static_cast<std::int64_t>(fl.x());
    const auto iy = static_cast<std::int64_t>(fl.y());
    const auto iz = static_cast<std::int64_t>(fl.z());
    const double fx = fade(u.x() - fl.x());
    const double fy = fade(u.y() - fl.y());
    const double fz = fade(u.z() - fl.z());

    double acc = 0;
    for (int dk = 0; dk < 2; ++dk) {
        for (int dj = 0; dj < 2; ++dj) {
            for (int di = 0; di < 2; ++di) {
                const double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                acc += w * lattice_value(ix + di, iy + dj, iz + dk, seed);
            }
        }
    }
    return acc;
}

// 3 octaves, amplitudes 1, 1/2, 1/4, normalized back into [-1,1]
double smooth_noise(const Vec3& p, double base_wavelength, std::uint64_t seed) {
    double acc = 0, amp = 1.0, total = 0, wavelength = base_wavelength;
    for (int octave = 0; octave < 3; ++octave) {
        acc += amp * value_noise(p, wavelength, hash_combine(seed, octave));
        total += amp;
        amp *= 0.5;
        wavelength *= 0.5;
    }
    return acc / total;
}

} // namespace

PriorResult synth_prior(const TriangleMesh& gt_mesh, const RigidTransform& first_view_camera_to_world,
                        const CorruptionParams& params) {
    if (gt_mesh.empty()) throw InvalidInput("synth_prior: empty mesh");
    if (params.hidden_color_shift < 0 || (params.hidden_geom_noise && *params.hidden_geom_noise < 0))
        throw InvalidInput("synth_prior: amplitudes must be >= 0");

    const double max_side = compute_obb_points(gt_mesh.vertices).max_side();
    const double geom_amp = params.hidden_geom_noise.value_or(0.05 * max_side);

    // classify vertices: front-facing and unoccluded from the first view
    const Vec3 camera = first_view_camera_to_world.translation;
    const std::vector<Vec3> normals = vertex_normals(gt_mesh);
    std::vector<std::uint8_t> visible(gt_mesh.vertices.size(), 0);
    {
        const Bvh bvh(gt_mesh);
        for (std::size_t v = 0; v < gt_mesh.vertices.size(); ++v) {
            const Vec3& p = gt_mesh.vertices[v];
            if (normals[v].dot(camera - p) <= 0) continue;
            const Vec3 dir = p - camera; // unnormalized: t == 1 at the vertex
            const double dist = dir.norm();
            if (dist < 1e-12) continue;
            const auto hit = bvh.intersect(camera, dir);
            if (hit && std::abs(hit->t - 1.0) * dist <= 1e-4) visible[v] = 1;
        }
    }

    TriangleMesh corrupted = gt_mesh;
    if (corrupted.vertex_colors.size() != corrupted.vertices.size())
        corrupted.vertex_colors.assign(corrupted.vertices.size(), Vec3(0.5, 0.5, 0.5));
    const double wavelength = std::max(max_side / 2.0, 1e-9);
    for (std::size_t v = 0; v < corrupted.vertices.size(); ++v) {
        if (visible[v]) continue;
        if (geom_amp > 0) {
            const double n = smooth_noise(gt_mesh.vertices[v], wavelength, params.rng_seed);
            corrupted.vertices[v] += geom_amp * n * normals[v];
        }
        if (params.hidden_color_shift > 0) {
            Vec3 c = corrupted.vertex_colors[v];
            for (int ch = 0; ch < 3; ++ch) {
                const double n = smooth_noise(gt_mesh.vertices[v], wavelength,
                                              hash_combine(params.rng_seed, 100 + ch));
                c[ch] = std::clamp(c[ch] + params.hidden_color_shift * n, 0.0, 1.0);
            }
            corrupted.vertex_colors[v] = c;
        }
    }

    // canonical frame: centroid at the origin, the camera ray toward the
    // centroid mapped onto -z (camera ends up on +z looking down) and the
    // camera's image-up mapped onto +y, matching the canonical renderer
    const RigidTransform world_to_camera = invert(first_view_camera_to_world);
    Vec3 centroid_cam = Vec3::Zero();
    for (const Vec3& p : corrupted.vertices) centroid_cam += world_to_camera.apply(p);
    centroid_cam /= static_cast<double>(corrupted.vertices.size());
    const double view_distance = centroid_cam.norm();
    if (view_distance < 1e-9) throw InvalidInput("synth_prior: camera inside the object");

    const Vec3 ray = centroid_cam / view_distance; // camera-frame direction to the centroid
    Vec3 image_up = Vec3(0, -1, 0) - (Vec3(0, -1, 0).dot(ray)) * ray;
    if (image_up.norm() < 1e-9) image_up = Vec3(1, 0, 0) - (Vec3(1, 0, 0).dot(ray)) * ray;
    image_up.normalize();

    Mat3 source; // columns: right-handed basis built on the viewing ray
    source.col(0) = image_up.cross(ray); // image-left
    source.col(1) = image_up;
    source.col(2) = ray;
    Mat3 target; // where that basis lands in the canonical frame
    target.col(0) = Vec3(-1, 0, 0);
    target.col(1) = Vec3(0, 1, 0);
    target.col(2) = Vec3(0, 0, -1);
    const Mat3 q = target * source.transpose();

    RigidTransform cam_to_canonical;
    cam_to_canonical.rotation = q;
    cam_to_canonical.translation = -(q * centroid_cam);

    PriorResult result;
    result.gt_to_canonical = compose(cam_to_canonical, world_to_camera);
    result.mesh = transform_mesh(corrupted, result.gt_to_canonical);
    if (params.normalize_scale) {
        result.normalization = compute_obb_points(result.mesh.vertices).max_side();
        if (!(result.normalization > 0)) throw NumericError("synth_prior: degenerate mesh extent");
        for (Vec3& v : result.mesh.vertices) v /= result.normalization;
    }
    return result;
}

ColoredPointCloud first_view_partial(const TriangleMesh& prior_mesh,
                                     const CameraIntrinsics& intrinsics) {
    if (prior_mesh.empty()) throw InvalidInput("first_view_partial: empty mesh");
    const Vec3 center = centroid(prior_mesh.vertices);
    const double max_side = compute_obb_points(prior_mesh.vertices).max_side();
    if (!(max_side > 0)) throw InvalidInput("first_view_partial: degenerate mesh");

    const Vec3 eye = center + Vec3(0, 0, kCanonicalViewDistanceFactor * max_side);
    const RigidTransform camera = look_at(eye, center, Vec3::UnitY());
    const RenderResult rendered = ray_cast_depth(prior_mesh, camera, intrinsics);

    Frame frame;
    frame.depth = rendered.depth;
    frame.color = rendered.color;
    frame.mask = rendered.mask;
    frame.intrinsics = intrinsics;
    const ColoredPointCloud cloud = backproject(frame);
    if (cloud.empty()) throw NumericError("first_view_partial: no rays hit the mesh");
    return cloud;
}

TriangleMesh external_prior(const std::string& request_dir, const std::string& adapter,
                            AdapterMode mode) {
    std::string ply_path;
    if (mode == AdapterMode::directory) {
        ply_path = adapter + "/prior.ply";
    } else {
        if (!std::filesystem::exists(request_dir))
            throw ConfigError("external_prior: request dir missing: " + request_dir);
        const ProcessResult result =
            run_command(adapter + " '" + request_dir + "'", "", request_dir);
        if (result.exit_code != 0)
            throw AdapterError("external_prior: adapter exited with code " +
                                   std::to_string(result.exit_code),
                               result.exit_code, result.error);
        ply_path = request_dir + "/prior.ply";
    }
    if (!std::filesystem::exists(ply_path))
        throw ConfigError("external_prior: missing " + ply_path);
    TriangleMesh mesh = read_ply(ply_path).to_mesh();
    if (mesh.empty()) throw ConfigError("external_prior: prior mesh is empty");
    return mesh;
}

} // namespace trackfuse
