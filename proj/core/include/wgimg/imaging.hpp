#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wgimg/operators.hpp"

namespace wgimg {

/// Mode-projected data matrix. Index j < M is TE mode j, index j >= M is TM
/// mode j - M (propagating modes only).
struct DataMatrixU {
  Eigen::MatrixXcd values;
  std::size_t M = 0;
  std::size_t N = 0;

  // Acquisition metadata.
  std::string scene_id;
  int n1 = 0;
  int n2 = 0;
  double r = 0.0;
  double a = 0.0;
  double b = 0.0;
  double k = 0.0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;

  std::size_t dim() const { return M + N; }
};

/// Test function Psi(y; z): finite sum over the propagating modes.
CMat3 psi_matrix(const ModeBasis& basis, const Point3& y, const Point3& z);

/// (H Psi(.; z) e_j)(x_star) from its closed modal form, before discarding the
/// (vanishing) imaginary part.
CVec3 h_psi_modal_complex(const ModeBasis& basis, const Point3& x_star,
                          const Point3& z, int j);

/// Real part of h_psi_modal_complex.
Vec3 h_psi_modal(const ModeBasis& basis, const Point3& x_star, const Point3& z, int j);

/// sum_j |H Psi(x_star; z) e_j|^2.
double psf_value(const ModeBasis& basis, const Point3& x_star, const Point3& z);

/// Projection vector g^l(z) of length M + N from the closed-form integrals.
Eigen::VectorXcd g_vector(const ModeBasis& basis, const Point3& z, int l);

/// Same integrals evaluated by midpoint quadrature on the grid.
Eigen::VectorXcd g_vector_quadrature(const ModeBasis& basis, const MeasurementGrid& grid,
                                     const Point3& z, int l);

/// Two-stage projection of the point-source data onto the propagating modes.
/// Requires a Nyquist-valid grid.
DataMatrixU assemble_U(const ModeBasis& basis, const PointSourceData& data,
                       const MeasurementGrid& grid);

/// I(z) = sum_l |g^l(z)^T U g^l(z)| (plain transpose).
double imaging_value(const ModeBasis& basis, const DataMatrixU& U, const Point3& z);

/// Axis-aligned sampling lattice; each range is inclusive.
struct LatticeSpec {
  std::array<double, 2> x1{};
  std::array<double, 2> x2{};
  std::array<double, 2> x3{};
  double spacing = 0.25;

  std::array<int, 3> dims() const;
};

/// Sampled image on a regular lattice; linear index i1 + n1 * (i2 + n2 * i3).
struct ImageVolume {
  Point3 origin;
  std::array<double, 3> spacing{};
  std::array<int, 3> dims{};
  std::vector<double> raw;    // I(z)
  std::vector<double> value;  // I(z)^2 / max I^2, in [0, 1]

  std::size_t size() const { return value.size(); }
  std::size_t index(int i1, int i2, int i3) const {
    return static_cast<std::size_t>(i1) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(i2) + static_cast<std::size_t>(dims[1]) * i3);
  }
  Point3 point(int i1, int i2, int i3) const {
    return {origin.x1 + i1 * spacing[0], origin.x2 + i2 * spacing[1],
            origin.x3 + i3 * spacing[2]};
  }
  Point3 point(std::size_t linear) const;

  /// Rescale `raw` into `value` (squared, normalized to max 1).
  void normalize();
};

/// Evaluates an arbitrary scalar field on the lattice (parallel over nodes)
/// and normalizes its square. Throws EmptyLattice.
template <class F>
ImageVolume sample_volume(const LatticeSpec& lattice, F&& f);

ImageVolume image_volume(const ModeBasis& basis, const DataMatrixU& U,
                         const LatticeSpec& lattice);

/// Point-spread volume: raw = sqrt(sum_j |H Psi(x_star; z) e_j|^2), so that
/// the normalized value is the PSF itself.
ImageVolume psf_volume(const ModeBasis& basis, const Point3& x_star,
                       const LatticeSpec& lattice);

/// U + level * ||U||_F / sqrt(2 (M+N)^2) * (G1 + i G2), G1, G2 standard normal
/// draws from a generator seeded with `seed`.
DataMatrixU add_noise(const DataMatrixU& U, double level, std::uint64_t seed);

}  // namespace wgimg

#include "wgimg/detail/sample_volume.hpp"
