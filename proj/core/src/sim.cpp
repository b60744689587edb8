#include "trackfuse/sim.hpp"

#include <cmath>
#include <filesystem>

#include "trackfuse/errors.hpp"
#include "trackfuse/parallel.hpp"
#include "trackfuse/rng.hpp"

namespace trackfuse {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 scheme_color(ColorScheme scheme, const Vec3& p, const Vec3& lo, const Vec3& hi) {
    switch (scheme) {
        case ColorScheme::solid:
            return {0.75, 0.35, 0.2};
        case ColorScheme::axis_gradient: {
            Vec3 c;
            for (int k = 0; k < 3; ++k) {
                const double span = std::max(hi[k] - lo[k], 1e-12);
                c[k] = 0.15 + 0.7 * (p[k] - lo[k]) / span;
            }
            return c;
        }
        case ColorScheme::checker: {
            const double cell = std::max((hi - lo).maxCoeff(), 1e-12) / 4.0;
            const long parity = (static_cast<long>(std::floor(p.x() / cell)) +
                                 static_cast<long>(std::floor(p.y() / cell)) +
                                 static_cast<long>(std::floor(p.z() / cell))) &
                                1;
            return parity ? Vec3(0.85, 0.85, 0.85) : Vec3(0.15, 0.15, 0.15);
        }
    }
    return {0.5, 0.5, 0.5};
}

void color_by_scheme(TriangleMesh& mesh, ColorScheme scheme) {
    const auto [lo, hi] = bounding_box(mesh.vertices);
    mesh.vertex_colors.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        mesh.vertex_colors[i] = scheme_color(scheme, mesh.vertices[i], lo, hi);
}

TriangleMesh make_box(const Vec3& dims, ColorScheme scheme) {
    const Vec3 h = dims / 2.0;
    TriangleMesh mesh;
    // 6 faces, 4 split vertices each, flat per-face color
    const int axes[6] = {0, 0, 1, 1, 2, 2};
    const int signs[6] = {+1, -1, +1, -1, +1, -1};
    for (int f = 0; f < 6; ++f) {
        const int a = axes[f], u = (a + 1) % 3, v = (a + 2) % 3;
        Vec3 normal = Vec3::Zero();
        normal[a] = signs[f];
        const int base = static_cast<int>(mesh.vertices.size());
        for (int corner = 0; corner < 4; ++corner) {
            Vec3 p;
            p[a] = signs[f] * h[a];
            p[u] = (corner == 1 || corner == 2) ? h[u] : -h[u];
            p[v] = (corner >= 2) ? h[v] : -h[v];
            mesh.vertices.push_back(p);
        }
        // wind so the face normal points along `normal`
        const Vec3 e1 = mesh.vertices[base + 1] - mesh.vertices[base];
        const Vec3 e2 = mesh.vertices[base + 2] - mesh.vertices[base];
        if (e1.cross(e2).dot(normal) > 0) {
            mesh.faces.push_back({base, base + 1, base + 2});
            mesh.faces.push_back({base, base + 2, base + 3});
        } else {
            mesh.faces.push_back({base, base + 2, base + 1});
            mesh.faces.push_back({base, base + 3, base + 2});
        }
    }
    const auto [lo, hi] = bounding_box(mesh.vertices);
    mesh.vertex_colors.resize(mesh.vertices.size());
    for (int f = 0; f < 6; ++f) {
        Vec3 center = Vec3::Zero();
        for (int c = 0; c < 4; ++c) center += mesh.vertices[4 * f + c];
        center /= 4.0;
        const Vec3 color = scheme_color(scheme, center, lo, hi);
        for (int c = 0; c < 4; ++c) mesh.vertex_colors[4 * f + c] = color;
    }
    return mesh;
}

// closed surface of revolution around +z; profile points (r, z) with both
// endpoints on the axis (r = 0)
TriangleMesh revolve_profile(const std::vector<Eigen::Vector2d>& profile, int segments) {
    TriangleMesh mesh;
    const int rings = static_cast<int>(profile.size()) - 2; // interior points
    // vertex layout: [0] bottom axis, [1 .. rings*segments] rings, [last] top axis
    mesh.vertices.emplace_back(0, 0, profile.front().y());
    for (int r = 0; r < rings; ++r) {
        const double radius = profile[r + 1].x();
        const double z = profile[r + 1].y();
        for (int s = 0; s < segments; ++s) {
            const double a = 2.0 * kPi * s / segments;
            mesh.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
        }
    }
    mesh.vertices.emplace_back(0, 0, profile.back().y());
    const int top = static_cast<int>(mesh.vertices.size()) - 1;

    auto ring_vertex = [&](int r, int s) { return 1 + r * segments + (s % segments); };

    for (int s = 0; s < segments; ++s)
        mesh.faces.push_back({0, ring_vertex(0, s + 1), ring_vertex(0, s)});
    for (int r = 0; r + 1 < rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            const int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
            const int c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
            mesh.faces.push_back({a, b, d});
            mesh.faces.push_back({a, d, c});
        }
    }
    for (int s = 0; s < segments; ++s)
        mesh.faces.push_back({top, ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1)});
    return mesh;
}

TriangleMesh make_cylinder(double radius, double height, ColorScheme scheme, int segments = 48) {
    const std::vector<Eigen::Vector2d> profile = {
        {0.0, -height / 2}, {radius, -height / 2}, {radius, height / 2}, {0.0, height / 2}};
    TriangleMesh mesh = revolve_profile(profile, segments);
    color_by_scheme(mesh, scheme);
    return mesh;
}

TriangleMesh make_torus(const Vec3& center, double major, double minor, int n_major, int n_minor) {
    TriangleMesh mesh;
    for (int i = 0; i < n_major; ++i) {
        const double theta = 2.0 * kPi * i / n_major;
        // ring lies in the x-z plane, tube bulges along y
        const Vec3 ring_dir(std::cos(theta), 0, std::sin(theta));
        for (int j = 0; j < n_minor; ++j) {
            const double phi = 2.0 * kPi * j / n_minor;
            const Vec3 p = center + (major + minor * std::cos(phi)) * ring_dir +
                           Vec3(0, minor * std::sin(phi), 0);
            mesh.vertices.push_back(p);
        }
    }
    auto vid = [&](int i, int j) { return (i % n_major) * n_minor + (j % n_minor); };
    for (int i = 0; i < n_major; ++i) {
        for (int j = 0; j < n_minor; ++j) {
            const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            // wound so face normals point out of the tube
            mesh.faces.push_back({a, c, b});
            mesh.faces.push_back({a, d, c});
        }
    }
    return mesh;
}

TriangleMesh make_mug(double outer_radius, double height, double handle_minor, ColorScheme scheme) {
    const double wall = std::max(0.12 * outer_radius, 1e-4);
    const double inner_radius = outer_radius - wall;
    const double z0 = -height / 2, z1 = height / 2;
    const std::vector<Eigen::Vector2d> profile = {
        {0.0, z0},          {inner_radius, z0},      {outer_radius, z0}, {outer_radius, z1},
        {inner_radius, z1}, {inner_radius, z0 + wall}, {0.0, z0 + wall}};
    TriangleMesh mesh = revolve_profile(profile, 48);

    const double handle_major = 2.8 * handle_minor;
    const Vec3 handle_center(inner_radius + handle_major + handle_minor, 0, 0);
    const TriangleMesh handle = make_torus(handle_center, handle_major, handle_minor, 32, 16);

    const int offset = static_cast<int>(mesh.vertices.size());
    mesh.vertices.insert(mesh.vertices.end(), handle.vertices.begin(), handle.vertices.end());
    for (const Face& f : handle.faces)
        mesh.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});

    color_by_scheme(mesh, scheme);
    return mesh;
}

} // namespace

TriangleMesh make_primitive(PrimitiveKind kind, const Vec3& dims, ColorScheme scheme) {
    TriangleMesh mesh;
    switch (kind) {
        case PrimitiveKind::box:
            if (dims.minCoeff() <= 0) throw InvalidInput("make_primitive: box dims must be positive");
            mesh = make_box(dims, scheme);
            break;
        case PrimitiveKind::cylinder:
            if (dims.x() <= 0 || dims.y() <= 0)
                throw InvalidInput("make_primitive: cylinder needs positive radius and height");
            mesh = make_cylinder(dims.x(), dims.y(), scheme);
            break;
        case PrimitiveKind::mug:
            if (dims.x() <= 0 || dims.y() <= 0 || dims.z() <= 0)
                throw InvalidInput("make_primitive: mug needs positive radius, height, handle radius");
            mesh = make_mug(dims.x(), dims.y(), dims.z(), scheme);
            break;
    }
    mesh.validate();
    return mesh;
}

PrimitiveKind primitive_from_name(const std::string& name) {
    if (name == "box") return PrimitiveKind::box;
    if (name == "cylinder") return PrimitiveKind::cylinder;
    if (name == "mug") return PrimitiveKind::mug;
    throw ConfigError("unknown primitive kind: " + name);
}

std::vector<RigidTransform> ring_trajectory(const Vec3& center, double radius, double height,
                                            int n_frames) {
    if (n_frames < 1) throw InvalidInput("ring_trajectory: n_frames must be >= 1");
    if (radius <= 0) throw InvalidInput("ring_trajectory: radius must be positive");
    std::vector<RigidTransform> poses;
    poses.reserve(n_frames);
    for (int i = 0; i < n_frames; ++i) {
        const double a = 2.0 * kPi * i / n_frames;
        const Vec3 eye = center + Vec3(radius * std::cos(a), radius * std::sin(a), height);
        poses.push_back(look_at(eye, center, Vec3::UnitZ()));
    }
    return poses;
}

RenderResult ray_cast_depth(const Bvh& bvh, const RigidTransform& camera,
                            const CameraIntrinsics& intrinsics) {
    intrinsics.validate();
    RenderResult out;
    out.depth = DepthImage(intrinsics.width, intrinsics.height, 0.f);
    out.mask = MaskImage(intrinsics.width, intrinsics.height, 0);
    out.color = ColorImage(intrinsics.width, intrinsics.height, Color3f{0.f, 0.f, 0.f});

    const TriangleMesh& mesh = bvh.mesh();
    const bool has_colors = mesh.vertex_colors.size() == mesh.vertices.size();

    parallel_for_chunks(intrinsics.height, [&](std::size_t vb, std::size_t ve) {
        for (std::size_t v = vb; v < ve; ++v) {
            for (int u = 0; u < intrinsics.width; ++u) {
                // unnormalized direction with unit z, so hit t equals camera-frame depth
                const Vec3 dir_cam((u - intrinsics.cx) / intrinsics.fx,
                                   (v - intrinsics.cy) / intrinsics.fy, 1.0);
                const Vec3 dir = camera.rotation * dir_cam;
                const auto hit = bvh.intersect(camera.translation, dir);
                if (!hit) continue;
                out.depth.at(u, static_cast<int>(v)) = static_cast<float>(hit->t);
                out.mask.at(u, static_cast<int>(v)) = 255;
                if (has_colors) {
                    const Face& f = mesh.faces[hit->face];
                    const Vec3 c = (1.0 - hit->u - hit->v) * mesh.vertex_colors[f[0]] +
                                   hit->u * mesh.vertex_colors[f[1]] +
                                   hit->v * mesh.vertex_colors[f[2]];
                    out.color.at(u, static_cast<int>(v)) = {static_cast<float>(c.x()),
                                                            static_cast<float>(c.y()),
                                                            static_cast<float>(c.z())};
                }
            }
        }
    });
    return out;
}

RenderResult ray_cast_depth(const TriangleMesh& mesh, const RigidTransform& camera,
                            const CameraIntrinsics& intrinsics) {
    return ray_cast_depth(Bvh(mesh), camera, intrinsics);
}

DepthImage add_depth_noise(const DepthImage& depth, const NoiseModel& model) {
    if (model.gaussian_sigma < 0) throw InvalidInput("noise: sigma must be >= 0");
    if (model.dropout_prob < 0 || model.dropout_prob > 1)
        throw InvalidInput("noise: dropout_prob must be in [0,1]");
    DepthImage out = depth;
    parallel_for_chunks(out.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const float d = depth.data[i];
            if (!(d > 0)) continue;
            Rng rng(hash_combine(model.rng_seed, i));
            if (model.dropout_prob > 0 && rng.uniform() < model.dropout_prob) {
                out.data[i] = 0.f;
                continue;
            }
            const double sigma = model.gaussian_sigma * static_cast<double>(d) * d;
            if (sigma > 0) {
                const double noisy = d + rng.normal() * sigma;
                out.data[i] = noisy > 0 ? static_cast<float>(noisy) : 0.f;
            }
        }
    });
    return out;
}

int write_dataset(const TriangleMesh& mesh, const std::vector<RigidTransform>& trajectory,
                  const CameraIntrinsics& intrinsics, const NoiseModel& noise,
                  const std::string& out_dir) {
    if (trajectory.empty()) throw InvalidInput("write_dataset: empty trajectory");
    std::filesystem::create_directories(out_dir);

    const Bvh bvh(mesh);
    DatasetMeta meta;
    meta.intrinsics = intrinsics;

    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        RenderResult rendered = ray_cast_depth(bvh, trajectory[i], intrinsics);
        NoiseModel frame_noise = noise;
        frame_noise.rng_seed = hash_combine(noise.rng_seed, i);
        const DepthImage noisy = add_depth_noise(rendered.depth, frame_noise);

        Frame frame;
        frame.depth = noisy;
        frame.color = std::move(rendered.color);
        frame.mask = std::move(rendered.mask);
        frame.intrinsics = intrinsics;
        frame.timestamp = static_cast<int>(i);
        write_frame(out_dir, static_cast<int>(i), frame);

        FrameMeta fm;
        fm.index = static_cast<int>(i);
        fm.gt_pose = invert(trajectory[i]).matrix(); // object frame == world frame
        meta.frames.push_back(fm);
    }
    write_meta(out_dir, meta);
    return static_cast<int>(meta.frames.size());
}

} // namespace trackfuse
