#pragma once

#include <filesystem>
#include <string>

#include "wgimg/imaging.hpp"

namespace wgimg {

// Binary layout, all little-endian:
//   "WGUS" u32 version n1 n2 | f64 r a b k | 3x3 complex128 blocks (x, y) in
//   node order, each block row-major.
//   "WGUM" u32 version M N n1 n2 | f64 r a b k noise | u64 seed |
//   u32 id length, id bytes | (M+N)^2 complex128 row-major.
// Throws IoError on short files, bad magic or unknown version.

void write_point_source_data(const std::filesystem::path& path, const PointSourceData& data);
PointSourceData read_point_source_data(const std::filesystem::path& path);

void write_data_matrix(const std::filesystem::path& path, const DataMatrixU& U);
DataMatrixU read_data_matrix(const std::filesystem::path& path);

/// JSON description of the voxels (center, volume, epsilon) plus an id.
void write_scene_json(const std::filesystem::path& path, const Scene& scene,
                      const std::string& scene_id);
Scene read_scene_json(const std::filesystem::path& path, std::string* scene_id = nullptr);

}  // namespace wgimg
