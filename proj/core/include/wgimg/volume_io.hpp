#pragma once

#include <filesystem>

#include "wgimg/imaging.hpp"

namespace wgimg {

/// CSV with header `x1,x2,x3,value`, one row per node in linear-index order.
void write_volume_csv(const std::filesystem::path& path, const ImageVolume& vol);

/// Legacy VTK, ASCII STRUCTURED_POINTS with one SCALARS field named I2.
void write_volume_vtk(const std::filesystem::path& path, const ImageVolume& vol);

// Readers restore the lattice and the normalized values; `raw` comes back
// empty since neither format stores it.
ImageVolume read_volume_csv(const std::filesystem::path& path);
ImageVolume read_volume_vtk(const std::filesystem::path& path);

/// Dispatches on the extension (.csv or .vtk).
ImageVolume read_volume(const std::filesystem::path& path);
void write_volume(const std::filesystem::path& path, const ImageVolume& vol);

}  // namespace wgimg
