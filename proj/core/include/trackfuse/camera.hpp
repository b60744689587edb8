#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

/// Pinhole intrinsics; focal lengths and principal point in pixels.
struct CameraIntrinsics {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;

    void validate() const;
};

template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    const T& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

using Color3f = std::array<float, 3>;
using DepthImage = Image<float>;   // meters; 0 = invalid
using ColorImage = Image<Color3f>; // channels in [0,1]
using MaskImage = Image<std::uint8_t>; // nonzero = object

/// One RGB-D observation. Depth, color and mask share the intrinsics' size.
struct Frame {
    DepthImage depth;
    ColorImage color;
    MaskImage mask;
    CameraIntrinsics intrinsics;
    int timestamp = 0;

    void validate() const;
};

/// One point per masked-in pixel with valid depth:
///   x = (u - cx) d / fx,  y = (v - cy) d / fy,  z = d,
/// colored from the color image. Output is in the camera frame and may be
/// empty if the mask selects no valid pixel.
ColoredPointCloud backproject(const Frame& frame);

/// Pixel coordinates of a camera-frame point (z > 0 assumed).
Eigen::Vector2d project(const CameraIntrinsics& k, const Vec3& p);

} // namespace trackfuse
