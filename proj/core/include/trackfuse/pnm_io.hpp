#pragma once

#include <string>

#include "trackfuse/camera.hpp"

namespace trackfuse {

/// P5, maxval 65535, big-endian values. Depth is stored as millimeters; the
/// in-memory image is meters (0 = invalid).
void write_depth_pgm(const std::string& path, const DepthImage& depth);
DepthImage read_depth_pgm(const std::string& path);

/// P5, maxval 255; 255 = object.
void write_mask_pgm(const std::string& path, const MaskImage& mask);
MaskImage read_mask_pgm(const std::string& path);

/// P6, 8-bit; channels quantized from [0,1].
void write_color_ppm(const std::string& path, const ColorImage& color);
ColorImage read_color_ppm(const std::string& path);

} // namespace trackfuse
