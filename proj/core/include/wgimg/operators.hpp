#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wgimg/green.hpp"

namespace wgimg {

struct Voxel {
  Point3 center;
  double volume = 0.0;
  cplx epsilon{1.0, 0.0};

  cplx contrast() const { return epsilon - 1.0; }
};

/// Voxelized scatterer inside the terminating guide.
class Scene {
 public:
  Scene() = default;
  explicit Scene(std::vector<Voxel> voxels) : voxels_(std::move(voxels)) {}

  std::span<const Voxel> voxels() const { return voxels_; }
  std::size_t size() const { return voxels_.size(); }
  bool empty() const { return voxels_.empty(); }

  /// Checks that voxels sit inside the guide with Re(eps) > 0 and that every
  /// voxel stays at least `clearance` above the plane x3 = r. Throws
  /// InvalidGeometry or SeparationViolated.
  void validate(const WaveguideSpec& spec, double r, double clearance) const;

  /// Smallest nonzero axial distance between voxels in different planes, or
  /// 0 when all voxels share a plane.
  double min_interplane_gap() const;
  double min_x3() const;

 private:
  std::vector<Voxel> voxels_;
};

/// Uniform n1 x n2 midpoint lattice on the measurement plane x3 = r.
/// Node i1 * n2 + i2 sits at ((i1 + 1/2) a / n1, (i2 + 1/2) b / n2, r).
class MeasurementGrid {
 public:
  MeasurementGrid(WaveguideSpec spec, double r, int n1, int n2);

  const WaveguideSpec& spec() const { return spec_; }
  double r() const { return r_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }
  double weight() const { return spec_.a * spec_.b / (static_cast<double>(n1_) * n2_); }
  Point3 node(std::size_t i) const;
  std::vector<Point3> nodes() const;

  /// n >= 2 * (largest propagating transverse index) + 2 in both directions.
  bool nyquist_ok(const ModeBasis& basis) const;
  void require_nyquist(const ModeBasis& basis) const;

 private:
  WaveguideSpec spec_;
  double r_;
  int n1_;
  int n2_;
};

struct ForwardModel {
  enum class Kind { Born, LS };
  Kind kind = Kind::Born;
  double tol = 1e-10;
  int max_iter = 200;

  static ForwardModel born() { return {}; }
  static ForwardModel ls(double tol = 1e-10, int max_iter = 200) {
    return {Kind::LS, tol, max_iter};
  }
};

using FieldList = std::vector<CVec3>;

struct TotalFieldResult {
  FieldList field;
  double residual = 0.0;
  int iterations = 0;
};

/// Scattered fields U^s(x; y) for every ordered pair of grid nodes, stored as a
/// (3 n) x (3 n) matrix whose 3x3 block (x, y) has the fields for source
/// polarizations e_1, e_2, e_3 as columns.
class PointSourceData {
 public:
  PointSourceData() = default;
  PointSourceData(const MeasurementGrid& grid, double k, Eigen::MatrixXcd values);

  std::size_t nodes() const { return nodes_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  double r() const { return r_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double k() const { return k_; }

  auto block(std::size_t x, std::size_t y) const {
    return values_.block<3, 3>(3 * static_cast<Eigen::Index>(x),
                               3 * static_cast<Eigen::Index>(y));
  }
  const Eigen::MatrixXcd& matrix() const { return values_; }

 private:
  std::size_t nodes_ = 0;
  int n1_ = 0;
  int n2_ = 0;
  double r_ = 0.0;
  double a_ = 0.0;
  double b_ = 0.0;
  double k_ = 0.0;
  Eigen::MatrixXcd values_;
};

/// w(x) = sum over nodes of weight * G(x, y) g(y) at each target point.
FieldList herglotz_field(const GreenEvaluator& green, const MeasurementGrid& grid,
                         std::span<const CVec3> density, std::span<const Point3> targets);

/// (nu x sum_v vol conj(G(x, y_v)) v(y_v)) x nu at every grid node; the third
/// component of every returned vector is zero.
FieldList adjoint_field(const GreenEvaluator& green, std::span<const CVec3> v,
                        const Scene& scene, const MeasurementGrid& grid);

/// Total field on the voxels for a given incident field. Born returns the
/// incident field; LS iterates w = inc + k^2 sum vol G contrast w, skipping
/// voxel pairs closer than the evaluator's minimum axial gap (self term
/// included). Throws LSDiverged.
TotalFieldResult total_field(const GreenEvaluator& green, const Scene& scene,
                             std::span<const CVec3> incident, const ForwardModel& model);

/// k^2 (eps - 1) * total_field per voxel.
FieldList apply_T(const GreenEvaluator& green, const Scene& scene,
                  std::span<const CVec3> incident, const ForwardModel& model);

/// Point-source scattered data on the measurement grid.
PointSourceData synthesize_data(const GreenEvaluator& green, const Scene& scene,
                                const MeasurementGrid& grid, const ForwardModel& model);

/// ||(N g) x nu - conj(H* conj(T H g))|| / ||(N g) x nu|| over the grid nodes,
/// with both sides built from the same forward model. Zero for g = 0.
double factorization_residual(const GreenEvaluator& green, const Scene& scene,
                              const MeasurementGrid& grid, const ForwardModel& model,
                              std::span<const CVec3> density);

/// Same, against precomputed data (avoids resynthesizing for many densities).
double factorization_residual(const GreenEvaluator& green, const Scene& scene,
                              const MeasurementGrid& grid, const ForwardModel& model,
                              const PointSourceData& data, std::span<const CVec3> density);

/// Outward normal of the measurement plane (away from the scatterer).
inline Vec3 measurement_normal() { return {0.0, 0.0, -1.0}; }

/// (nu x a) x nu: the component of `a` tangential to the measurement plane.
CVec3 tangential_part(const CVec3& a);

}  // namespace wgimg
