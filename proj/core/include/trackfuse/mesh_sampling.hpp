#pragma once

#include <cstdint>

#include "trackfuse/point_cloud.hpp"

namespace trackfuse {

/// Area-weighted uniform surface sampling. Each sample carries the face
/// normal and the barycentrically interpolated vertex color (mid-gray when
/// the mesh has no colors). Deterministic for a given seed.
ColoredPointCloud sample_mesh_surface(const TriangleMesh& mesh, int count, std::uint64_t seed);

} // namespace trackfuse
