#include "wgimg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wgimg {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": expected " << want << " entries, got " << got;
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

void check_plane_separation(const GreenEvaluator& green, const MeasurementGrid& grid,
                            double x3) {
  if (std::abs(x3 - grid.r()) < green.min_axial_gap() * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "point at x3=" << x3 << " is closer than " << green.min_axial_gap()
       << " to the measurement plane x3=" << grid.r();
    throw Error(ErrorKind::SeparationViolated, os.str());
  }
}

bool coupled(const GreenEvaluator& green, const Voxel& a, const Voxel& b) {
  return std::abs(a.center.x3 - b.center.x3) >= green.min_axial_gap() * (1.0 - 1e-12);
}

/// K with block (v, v') = k^2 vol' contrast' G(v, v') for coupled pairs.
MatrixXcd coupling_matrix(const GreenEvaluator& green, const Scene& scene) {
  const auto vox = scene.voxels();
  const Index n = static_cast<Index>(vox.size());
  const double k2 = green.k() * green.k();
  std::vector<GreenEvaluator::Site> sites;
  sites.reserve(vox.size());
  for (const Voxel& v : vox) sites.push_back(green.make_site(v.center));

  MatrixXcd K = MatrixXcd::Zero(3 * n, 3 * n);
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j || !coupled(green, vox[i], vox[j])) continue;
      const cplx s = k2 * vox[j].volume * vox[j].contrast();
      K.block<3, 3>(3 * i, 3 * j) = s * green.half(sites[i], sites[j]);
    }
  }
  return K;
}

bool has_coupling(const GreenEvaluator& green, const Scene& scene) {
  const auto vox = scene.voxels();
  for (std::size_t i = 0; i < vox.size(); ++i) {
    for (std::size_t j = i + 1; j < vox.size(); ++j) {
      if (coupled(green, vox[i], vox[j])) return true;
    }
  }
  return false;
}

/// Fixed-point iteration W = inc + K W for all columns at once.
MatrixXcd solve_ls(const MatrixXcd& K, const MatrixXcd& inc, const ForwardModel& model,
                   double* residual, int* iterations) {
  const double inc_norm = inc.norm();
  if (inc_norm == 0.0) {
    *residual = 0.0;
    *iterations = 0;
    return inc;
  }
  MatrixXcd W = inc;
  for (int it = 1; it <= model.max_iter; ++it) {
    MatrixXcd next = inc;
    next.noalias() += K * W;
    const double res = (next - W).norm() / inc_norm;
    W.swap(next);
    if (!std::isfinite(res)) break;
    if (res <= model.tol) {
      *residual = res;
      *iterations = it;
      return W;
    }
  }
  std::ostringstream os;
  os << "Lippmann-Schwinger iteration did not reach tol=" << model.tol << " within "
     << model.max_iter << " iterations";
  throw Error(ErrorKind::LSDiverged, os.str());
}

MatrixXcd stack(std::span<const CVec3> f) {
  MatrixXcd out(3 * static_cast<Index>(f.size()), 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.block<3, 1>(3 * static_cast<Index>(i), 0) = f[i];
  }
  return out;
}

FieldList unstack(const MatrixXcd& m) {
  FieldList out(static_cast<std::size_t>(m.rows() / 3));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = m.block<3, 1>(3 * static_cast<Index>(i), 0);
  }
  return out;
}

}  // namespace

void Scene::validate(const WaveguideSpec& spec, double r, double clearance) const {
  for (std::size_t i = 0; i < voxels_.size(); ++i) {
    const Voxel& v = voxels_[i];
    std::ostringstream os;
    os << "voxel " << i << " at (" << v.center.x1 << ", " << v.center.x2 << ", "
       << v.center.x3 << ")";
    if (!(v.center.x3 < 0.0) || !spec.contains_transverse(v.center.x1, v.center.x2, 0.0)) {
      throw Error(ErrorKind::InvalidGeometry, os.str() + " is outside the guide");
    }
    if (!(v.volume > 0.0)) {
      throw Error(ErrorKind::InvalidGeometry, os.str() + " has non-positive volume");
    }
    if (!(v.epsilon.real() > 0.0) || !(v.epsilon.imag() >= 0.0) ||
        !std::isfinite(std::abs(v.epsilon))) {
      throw Error(ErrorKind::InvalidGeometry,
                  os.str() + " needs a permittivity with Re > 0 and Im >= 0");
    }
    const double half_extent = 0.5 * std::cbrt(v.volume);
    if (v.center.x3 - half_extent - r < clearance) {
      std::ostringstream msg;
      msg << os.str() << " lies within " << clearance
          << " of the measurement plane x3=" << r;
      throw Error(ErrorKind::SeparationViolated, msg.str());
    }
  }
}

double Scene::min_interplane_gap() const {
  std::vector<double> planes;
  for (const Voxel& v : voxels_) planes.push_back(v.center.x3);
  std::sort(planes.begin(), planes.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < planes.size(); ++i) {
    const double d = planes[i] - planes[i - 1];
    if (d > 1e-12 && (gap == 0.0 || d < gap)) gap = d;
  }
  return gap;
}

double Scene::min_x3() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Voxel& v : voxels_) m = std::min(m, v.center.x3);
  return m;
}

MeasurementGrid::MeasurementGrid(WaveguideSpec spec, double r, int n1, int n2)
    : spec_(spec), r_(r), n1_(n1), n2_(n2) {
  spec_.validate();
  if (n1 < 1 || n2 < 1) {
    throw Error(ErrorKind::InvalidGeometry, "measurement grid needs n1, n2 >= 1");
  }
  if (!(r < 0.0)) {
    throw Error(ErrorKind::InvalidGeometry, "measurement plane must satisfy r < 0");
  }
}

Point3 MeasurementGrid::node(std::size_t i) const {
  const auto i1 = static_cast<int>(i / static_cast<std::size_t>(n2_));
  const auto i2 = static_cast<int>(i % static_cast<std::size_t>(n2_));
  return {(i1 + 0.5) * spec_.a / n1_, (i2 + 0.5) * spec_.b / n2_, r_};
}

std::vector<Point3> MeasurementGrid::nodes() const {
  std::vector<Point3> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
  return out;
}

bool MeasurementGrid::nyquist_ok(const ModeBasis& basis) const {
  const int need = 2 * basis.max_propagating_index() + 2;
  return n1_ >= need && n2_ >= need;
}

void MeasurementGrid::require_nyquist(const ModeBasis& basis) const {
  if (!nyquist_ok(basis)) {
    std::ostringstream os;
    os << "measurement grid " << n1_ << "x" << n2_ << " is too coarse: mode projection "
       << "needs at least " << 2 * basis.max_propagating_index() + 2
       << " nodes per direction";
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

PointSourceData::PointSourceData(const MeasurementGrid& grid, double k,
                                 Eigen::MatrixXcd values)
    : nodes_(grid.size()),
      n1_(grid.n1()),
      n2_(grid.n2()),
      r_(grid.r()),
      a_(grid.spec().a),
      b_(grid.spec().b),
      k_(k),
      values_(std::move(values)) {
  if (values_.rows() != 3 * static_cast<Index>(nodes_) || values_.cols() != values_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "point-source data has the wrong shape");
  }
}

CVec3 tangential_part(const CVec3& a) {
  const Vec3 nu = measurement_normal();
  const CVec3 n = nu.cast<cplx>();
  return (n.cross(a)).cross(n);
}

FieldList herglotz_field(const GreenEvaluator& green, const MeasurementGrid& grid,
                         std::span<const CVec3> density, std::span<const Point3> targets) {
  check_size(density.size(), grid.size(), "herglotz_field density");
  for (const Point3& t : targets) check_plane_separation(green, grid, t.x3);

  std::vector<GreenEvaluator::Site> nodes;
  nodes.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nodes.push_back(green.make_site(grid.node(i)));

  const double w = grid.weight();
  FieldList out(targets.size(), CVec3::Zero());
  const auto nt = static_cast<std::ptrdiff_t>(targets.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    const auto site = green.make_site(targets[static_cast<std::size_t>(t)]);
    CVec3 acc = CVec3::Zero();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (density[i].isZero(0.0)) continue;
      acc.noalias() += green.half(site, nodes[i]) * density[i];
    }
    out[static_cast<std::size_t>(t)] = w * acc;
  }
  return out;
}

FieldList adjoint_field(const GreenEvaluator& green, std::span<const CVec3> v,
                        const Scene& scene, const MeasurementGrid& grid) {
  check_size(v.size(), scene.size(), "adjoint_field");
  const auto vox = scene.voxels();
  for (const Voxel& x : vox) check_plane_separation(green, grid, x.center.x3);

  std::vector<GreenEvaluator::Site> sites;
  for (const Voxel& x : vox) sites.push_back(green.make_site(x.center));

  FieldList out(grid.size(), CVec3::Zero());
  const auto nn = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < nn; ++i) {
    const auto node = green.make_site(grid.node(static_cast<std::size_t>(i)));
    CVec3 acc = CVec3::Zero();
    for (std::size_t j = 0; j < vox.size(); ++j) {
      acc.noalias() += vox[j].volume * (green.half(node, sites[j]).conjugate() * v[j]);
    }
    out[static_cast<std::size_t>(i)] = tangential_part(acc);
  }
  return out;
}

TotalFieldResult total_field(const GreenEvaluator& green, const Scene& scene,
                             std::span<const CVec3> incident, const ForwardModel& model) {
  check_size(incident.size(), scene.size(), "total_field incident");
  TotalFieldResult res;
  if (model.kind == ForwardModel::Kind::Born || !has_coupling(green, scene)) {
    res.field.assign(incident.begin(), incident.end());
    return res;
  }
  const MatrixXcd K = coupling_matrix(green, scene);
  const MatrixXcd W = solve_ls(K, stack(incident), model, &res.residual, &res.iterations);
  res.field = unstack(W);
  return res;
}

FieldList apply_T(const GreenEvaluator& green, const Scene& scene,
                  std::span<const CVec3> incident, const ForwardModel& model) {
  TotalFieldResult tot = total_field(green, scene, incident, model);
  const double k2 = green.k() * green.k();
  const auto vox = scene.voxels();
  for (std::size_t i = 0; i < vox.size(); ++i) tot.field[i] *= k2 * vox[i].contrast();
  return tot.field;
}

PointSourceData synthesize_data(const GreenEvaluator& green, const Scene& scene,
                                const MeasurementGrid& grid, const ForwardModel& model) {
  const std::size_t nn = grid.size();
  const Index n3 = 3 * static_cast<Index>(nn);
  if (scene.empty()) return PointSourceData(grid, green.k(), MatrixXcd::Zero(n3, n3));

  const auto vox = scene.voxels();
  for (const Voxel& v : vox) check_plane_separation(green, grid, v.center.x3);
  const Index nv = static_cast<Index>(vox.size());

  std::vector<GreenEvaluator::Site> node_sites(nn);
  std::vector<GreenEvaluator::Site> vox_sites(vox.size());
  for (std::size_t i = 0; i < nn; ++i) node_sites[i] = green.make_site(grid.node(i));
  for (std::size_t v = 0; v < vox.size(); ++v) vox_sites[v] = green.make_site(vox[v].center);

  // Receiver table G(x, v) and source table G(v, y), filled before any
  // reduction so every entry is written by exactly one thread.
  MatrixXcd to_receivers(n3, 3 * nv);
  MatrixXcd from_sources(3 * nv, n3);
  const auto nn_signed = static_cast<std::ptrdiff_t>(nn);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < nn_signed; ++i) {
    const auto& node = node_sites[static_cast<std::size_t>(i)];
    for (Index v = 0; v < nv; ++v) {
      const auto& vs = vox_sites[static_cast<std::size_t>(v)];
      to_receivers.block<3, 3>(3 * i, 3 * v) = green.half(node, vs);
      from_sources.block<3, 3>(3 * v, 3 * i) = green.half(vs, node);
    }
  }

  MatrixXcd total;
  if (model.kind == ForwardModel::Kind::LS && has_coupling(green, scene)) {
    double residual = 0.0;
    int iterations = 0;
    total = solve_ls(coupling_matrix(green, scene), from_sources, model, &residual,
                     &iterations);
  } else {
    total = std::move(from_sources);
  }

  const double k2 = green.k() * green.k();
  for (Index v = 0; v < nv; ++v) {
    const cplx s = k2 * vox[static_cast<std::size_t>(v)].volume *
                   vox[static_cast<std::size_t>(v)].contrast();
    total.middleRows(3 * v, 3) *= s;
  }
  MatrixXcd values = to_receivers * total;
  return PointSourceData(grid, green.k(), std::move(values));
}

double factorization_residual(const GreenEvaluator& green, const Scene& scene,
                              const MeasurementGrid& grid, const ForwardModel& model,
                              std::span<const CVec3> density) {
  return factorization_residual(green, scene, grid, model,
                                synthesize_data(green, scene, grid, model), density);
}

double factorization_residual(const GreenEvaluator& green, const Scene& scene,
                              const MeasurementGrid& grid, const ForwardModel& model,
                              const PointSourceData& data, std::span<const CVec3> density) {
  check_size(density.size(), grid.size(), "factorization_residual density");
  check_size(data.nodes(), grid.size(), "factorization_residual data");
  const double w = grid.weight();

  // (N g) x nu from the data.
  FieldList lhs(grid.size(), CVec3::Zero());
  for (std::size_t x = 0; x < grid.size(); ++x) {
    CVec3 acc = CVec3::Zero();
    for (std::size_t y = 0; y < grid.size(); ++y) {
      acc.noalias() += data.block(x, y) * density[y];
    }
    lhs[x] = tangential_part(w * acc);
  }

  // conj(H* conj(T H g)) through the operator chain.
  std::vector<Point3> centers;
  for (const Voxel& v : scene.voxels()) centers.push_back(v.center);
  const FieldList hg = herglotz_field(green, grid, density, centers);
  FieldList thg = apply_T(green, scene, hg, model);
  for (CVec3& f : thg) f = f.conjugate().eval();
  FieldList rhs = adjoint_field(green, thg, scene, grid);
  for (CVec3& f : rhs) f = f.conjugate().eval();

  double num = 0.0;
  double den = 0.0;
  for (std::size_t x = 0; x < grid.size(); ++x) {
    num += (lhs[x] - rhs[x]).squaredNorm();
    den += lhs[x].squaredNorm();
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

}  // namespace wgimg
