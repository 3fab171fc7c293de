#pragma once

#include <cstddef>

namespace wgimg {

template <class F>
ImageVolume sample_volume(const LatticeSpec& lattice, F&& f) {
  const auto dims = lattice.dims();
  ImageVolume vol;
  vol.origin = {lattice.x1[0], lattice.x2[0], lattice.x3[0]};
  vol.spacing = {lattice.spacing, lattice.spacing, lattice.spacing};
  vol.dims = dims;
  const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  vol.raw.assign(n, 0.0);
  const auto ns = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < ns; ++i) {
    vol.raw[static_cast<std::size_t>(i)] = f(vol.point(static_cast<std::size_t>(i)));
  }
  vol.normalize();
  return vol;
}

}  // namespace wgimg
