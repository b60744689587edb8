#include "trackfuse/camera.hpp"

#include <cmath>

#include "trackfuse/errors.hpp"

namespace trackfuse {

void CameraIntrinsics::validate() const {
    if (fx <= 0 || fy <= 0) throw InvalidInput("intrinsics: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw InvalidInput("intrinsics: bad image size");
    if (cx < 0 || cx >= width || cy < 0 || cy >= height)
        throw InvalidInput("intrinsics: principal point outside the image");
}

void Frame::validate() const {
    intrinsics.validate();
    const bool sized = depth.width == intrinsics.width && depth.height == intrinsics.height &&
                       color.width == intrinsics.width && color.height == intrinsics.height &&
                       mask.width == intrinsics.width && mask.height == intrinsics.height;
    if (!sized) throw InvalidInput("frame: image dimensions disagree with intrinsics");
}

ColoredPointCloud backproject(const Frame& frame) {
    frame.validate();
    const CameraIntrinsics& k = frame.intrinsics;
    ColoredPointCloud cloud;
    for (int v = 0; v < k.height; ++v) {
        for (int u = 0; u < k.width; ++u) {
            if (!frame.mask.at(u, v)) continue;
            const double d = frame.depth.at(u, v);
            if (!(d > 0) || !std::isfinite(d)) continue;
            const Vec3 p((u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d);
            const Color3f& c = frame.color.at(u, v);
            cloud.push_back(p, Vec3(c[0], c[1], c[2]));
        }
    }
    return cloud;
}

Eigen::Vector2d project(const CameraIntrinsics& k, const Vec3& p) {
    return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

} // namespace trackfuse
