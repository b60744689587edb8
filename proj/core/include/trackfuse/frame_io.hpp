#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trackfuse/camera.hpp"
#include "trackfuse/geometry.hpp"

namespace trackfuse {

struct FrameMeta {
    int index = 0;
    std::optional<Mat4> gt_pose; // object-to-camera, row-major in the file
};

struct DatasetMeta {
    CameraIntrinsics intrinsics;
    std::vector<FrameMeta> frames;

    bool has_ground_truth() const;
};

/// depth_%06d.pgm / color_%06d.ppm / mask_%06d.pgm under `dir`.
void write_frame(const std::string& dir, int index, const Frame& frame);
Frame read_frame(const std::string& dir, int index, const CameraIntrinsics& intrinsics);

void write_meta(const std::string& dir, const DatasetMeta& meta);

/// Throws ConfigError naming the path when meta.json is absent or invalid.
DatasetMeta read_meta(const std::string& dir);

std::string frame_file(const std::string& dir, const char* prefix, int index, const char* ext);

} // namespace trackfuse
