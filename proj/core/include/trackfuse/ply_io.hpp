#pragma once

#include <string>

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

/// Vertex payload of a PLY file: positions, optional colors/normals, faces.
struct PlyData {
    std::vector<Vec3> positions;
    std::vector<Vec3> colors;  // empty if the file has no red/green/blue
    std::vector<Vec3> normals; // empty if the file has no nx/ny/nz
    std::vector<Face> faces;

    TriangleMesh to_mesh() const;
    ColoredPointCloud to_cloud() const;
};

/// Reads ascii or binary_little_endian PLY. Recognized vertex properties are
/// x,y,z (float/double), red,green,blue (uchar or float) and nx,ny,nz; other
/// properties are skipped. Throws ParseError with the byte offset on
/// malformed input.
PlyData read_ply(const std::string& path);

struct PlyWriteOptions {
    bool binary = true;
    bool with_normals = false;
};

/// x,y,z as float32, red,green,blue as uint8, optional nx,ny,nz as float32,
/// faces as uchar-counted int32 vertex_indices lists.
void write_ply(const std::string& path, const TriangleMesh& mesh, const PlyWriteOptions& opts = {});
void write_ply(const std::string& path, const ColoredPointCloud& cloud, const PlyWriteOptions& opts = {});

} // namespace trackfuse
