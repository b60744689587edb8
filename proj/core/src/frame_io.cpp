#include "trackfuse/frame_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "trackfuse/errors.hpp"
#include "trackfuse/pnm_io.hpp"

namespace trackfuse {

using nlohmann::json;

bool DatasetMeta::has_ground_truth() const {
    if (frames.empty()) return false;
    for (const FrameMeta& f : frames) {
        if (!f.gt_pose) return false;
    }
    return true;
}

std::string frame_file(const std::string& dir, const char* prefix, int index, const char* ext) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%06d.%s", prefix, index, ext);
    return dir + "/" + name;
}

void write_frame(const std::string& dir, int index, const Frame& frame) {
    write_depth_pgm(frame_file(dir, "depth", index, "pgm"), frame.depth);
    write_color_ppm(frame_file(dir, "color", index, "ppm"), frame.color);
    write_mask_pgm(frame_file(dir, "mask", index, "pgm"), frame.mask);
}

Frame read_frame(const std::string& dir, int index, const CameraIntrinsics& intrinsics) {
    Frame frame;
    frame.depth = read_depth_pgm(frame_file(dir, "depth", index, "pgm"));
    frame.color = read_color_ppm(frame_file(dir, "color", index, "ppm"));
    frame.mask = read_mask_pgm(frame_file(dir, "mask", index, "pgm"));
    frame.intrinsics = intrinsics;
    frame.timestamp = index;
    frame.validate();
    return frame;
}

namespace {

json pose_to_json(const Mat4& m) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Mat4 pose_from_json(const json& j) {
    Mat4 m;
    if (!j.is_array() || j.size() != 4) throw ConfigError("meta.json: gt_pose must be a 4x4 array");
    for (int r = 0; r < 4; ++r) {
        if (!j[r].is_array() || j[r].size() != 4)
            throw ConfigError("meta.json: gt_pose must be a 4x4 array");
        for (int c = 0; c < 4; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

} // namespace

void write_meta(const std::string& dir, const DatasetMeta& meta) {
    json j;
    j["fx"] = meta.intrinsics.fx;
    j["fy"] = meta.intrinsics.fy;
    j["cx"] = meta.intrinsics.cx;
    j["cy"] = meta.intrinsics.cy;
    j["width"] = meta.intrinsics.width;
    j["height"] = meta.intrinsics.height;
    json frames = json::array();
    for (const FrameMeta& f : meta.frames) {
        json jf;
        jf["index"] = f.index;
        if (f.gt_pose) jf["gt_pose"] = pose_to_json(*f.gt_pose);
        frames.push_back(jf);
    }
    j["frames"] = frames;

    const std::string path = dir + "/meta.json";
    std::ofstream out(path);
    if (!out) throw ConfigError("meta.json: cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

DatasetMeta read_meta(const std::string& dir) {
    const std::string path = dir + "/meta.json";
    std::ifstream in(path);
    if (!in) throw ConfigError("dataset: missing " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("dataset: invalid " + path + ": " + e.what());
    }
    DatasetMeta meta;
    try {
        meta.intrinsics.fx = j.at("fx").get<double>();
        meta.intrinsics.fy = j.at("fy").get<double>();
        meta.intrinsics.cx = j.at("cx").get<double>();
        meta.intrinsics.cy = j.at("cy").get<double>();
        meta.intrinsics.width = j.at("width").get<int>();
        meta.intrinsics.height = j.at("height").get<int>();
        for (const json& jf : j.at("frames")) {
            FrameMeta f;
            f.index = jf.at("index").get<int>();
            if (jf.contains("gt_pose")) f.gt_pose = pose_from_json(jf["gt_pose"]);
            meta.frames.push_back(f);
        }
    } catch (const json::exception& e) {
        throw ConfigError("dataset: bad field in " + path + ": " + e.what());
    }
    meta.intrinsics.validate();
    return meta;
}

} // namespace trackfuse
