#include "wgimg/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace wgimg {

namespace {

using Eigen::Index;

CVec3 field(const ModeBasis& basis, const ModeIndex& m, const Point3& x, ModeField which) {
  return eval_mode_field(m, basis.spec(), basis.k(), x, which);
}

CVec3 conj_field(const ModeBasis& basis, const ModeIndex& m, const Point3& x,
                 ModeField which) {
  return field(basis, m, x, which).conjugate();
}

// [conj M(z) - conj M(z-)]
CVec3 te_z_factor(const ModeBasis& basis, const ModeIndex& m, const Point3& z) {
  const Point3 zm = mirror_point(z);
  return conj_field(basis, m, z, ModeField::M) - conj_field(basis, m, zm, ModeField::M);
}

// [conj P(z) - conj P(z-)] + [conj Q(z) + conj Q(z-)]
CVec3 tm_z_factor(const ModeBasis& basis, const ModeIndex& n, const Point3& z) {
  const Point3 zm = mirror_point(z);
  return conj_field(basis, n, z, ModeField::P) - conj_field(basis, n, zm, ModeField::P) +
         conj_field(basis, n, z, ModeField::Q) + conj_field(basis, n, zm, ModeField::Q);
}

void check_axis(int j) {
  if (j < 0 || j > 2) {
    throw Error(ErrorKind::DimensionMismatch, "axis index must be 0, 1 or 2");
  }
}

}  // namespace

CMat3 psi_matrix(const ModeBasis& basis, const Point3& y, const Point3& z) {
  const double k = basis.k();
  const Point3 ym = mirror_point(y);
  CMat3 psi = CMat3::Zero();
  for (const ModeIndex& m : basis.propagating_te()) {
    const double l2 = m.cutoff * m.cutoff;
    const cplx coef = -kI * m.axial / (2.0 * l2);
    psi.noalias() += coef * conj_field(basis, m, ym, ModeField::M) *
                     te_z_factor(basis, m, z).transpose();
  }
  for (const ModeIndex& n : basis.propagating_tm()) {
    const double mu2 = n.cutoff * n.cutoff;
    const cplx coef = kI * k * k / (2.0 * mu2 * n.axial);
    psi.noalias() += coef * conj_field(basis, n, ym, ModeField::P) *
                     tm_z_factor(basis, n, z).transpose();
  }
  return psi;
}

CVec3 h_psi_modal_complex(const ModeBasis& basis, const Point3& x_star, const Point3& z,
                          int j) {
  check_axis(j);
  const Point3 xm = mirror_point(x_star);
  CVec3 out = CVec3::Zero();
  for (const ModeIndex& m : basis.propagating_te()) {
    const double l2 = m.cutoff * m.cutoff;
    const cplx c = kI / (2.0 * m.axial * l2);
    const cplx coef = -kI * c * m.axial / 2.0;
    const CVec3 xf = field(basis, m, x_star, ModeField::M) - field(basis, m, xm, ModeField::M);
    out += coef * xf * te_z_factor(basis, m, z)[j];
  }
  for (const ModeIndex& n : basis.propagating_tm()) {
    const double mu2 = n.cutoff * n.cutoff;
    const cplx d = -kI / (2.0 * n.axial * mu2);
    const cplx coef = kI * d * n.axial / 2.0;
    const CVec3 xf = field(basis, n, x_star, ModeField::P) - field(basis, n, xm, ModeField::P) +
                     field(basis, n, x_star, ModeField::Q) + field(basis, n, xm, ModeField::Q);
    out += coef * xf * tm_z_factor(basis, n, z)[j];
  }
  return out;
}

Vec3 h_psi_modal(const ModeBasis& basis, const Point3& x_star, const Point3& z, int j) {
  return h_psi_modal_complex(basis, x_star, z, j).real();
}

double psf_value(const ModeBasis& basis, const Point3& x_star, const Point3& z) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j) s += h_psi_modal(basis, x_star, z, j).squaredNorm();
  return s;
}

Eigen::VectorXcd g_vector(const ModeBasis& basis, const Point3& z, int l) {
  check_axis(l);
  const double k = basis.k();
  const std::size_t M = basis.M();
  Eigen::VectorXcd g(static_cast<Index>(M + basis.N()));
  // The Psi coefficients times the orthogonality constants lambda^2 and
  // mu^2 g^2 / k^2 of the projected mode against its own test-function term.
  for (const ModeIndex& m : basis.propagating_te()) {
    const double l2 = m.cutoff * m.cutoff;
    const cplx coef = -kI * m.axial / (2.0 * l2) * l2;
    g[static_cast<Index>(m.linear)] = coef * te_z_factor(basis, m, z)[l];
  }
  for (const ModeIndex& n : basis.propagating_tm()) {
    const double mu2 = n.cutoff * n.cutoff;
    const cplx coef =
        kI * k * k / (2.0 * mu2 * n.axial) * (mu2 * n.axial * n.axial / (k * k));
    g[static_cast<Index>(M + n.linear)] = coef * tm_z_factor(basis, n, z)[l];
  }
  return g;
}

Eigen::VectorXcd g_vector_quadrature(const ModeBasis& basis, const MeasurementGrid& grid,
                                     const Point3& z, int l) {
  check_axis(l);
  const std::size_t M = basis.M();
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Index>(M + basis.N()));
  const double w = grid.weight();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point3 y = grid.node(i);
    const Point3 ym = mirror_point(y);
    const CVec3 psi_l = psi_matrix(basis, y, z).col(l);
    for (const ModeIndex& m : basis.propagating_te()) {
      g[static_cast<Index>(m.linear)] +=
          w * field(basis, m, ym, ModeField::M).cwiseProduct(psi_l).sum();
    }
    for (const ModeIndex& n : basis.propagating_tm()) {
      const CVec3 pq = field(basis, n, ym, ModeField::P) - field(basis, n, ym, ModeField::Q);
      g[static_cast<Index>(M + n.linear)] += w * pq.cwiseProduct(psi_l).sum();
    }
  }
  return g;
}

DataMatrixU assemble_U(const ModeBasis& basis, const PointSourceData& data,
                       const MeasurementGrid& grid) {
  if (data.nodes() != grid.size() || data.n1() != grid.n1() || data.n2() != grid.n2()) {
    throw Error(ErrorKind::DimensionMismatch, "point-source data does not match the grid");
  }
  grid.require_nyquist(basis);
  const std::size_t M = basis.M();
  const auto dim = static_cast<Index>(M + basis.N());
  const auto n3 = static_cast<Index>(3 * grid.size());

  // Column j holds the mirrored-plane mode vector of index j: conj(M_j)(y-) /
  // lambda_j^2 or conj(P_j - Q_j)(y-) / mu_j^2. The same vectors serve the
  // receiver (x-) side.
  Eigen::MatrixXcd phi(n3, dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point3 ym = mirror_point(grid.node(i));
    const auto row = 3 * static_cast<Index>(i);
    for (const ModeIndex& m : basis.propagating_te()) {
      phi.block<3, 1>(row, static_cast<Index>(m.linear)) =
          conj_field(basis, m, ym, ModeField::M) / (m.cutoff * m.cutoff);
    }
    for (const ModeIndex& n : basis.propagating_tm()) {
      phi.block<3, 1>(row, static_cast<Index>(M + n.linear)) =
          (conj_field(basis, n, ym, ModeField::P) - conj_field(basis, n, ym, ModeField::Q)) /
          (n.cutoff * n.cutoff);
    }
  }

  const double w = grid.weight();
  // Stage 1: contract the source side, O(nodes^2 (M+N)).
  const Eigen::MatrixXcd stage1 = (w * data.matrix()) * phi;
  // Stage 2: contract the receiver side.
  const Eigen::MatrixXcd projected = (w * phi.transpose()) * stage1;

  DataMatrixU U;
  U.values = projected.transpose();
  U.M = M;
  U.N = basis.N();
  U.n1 = grid.n1();
  U.n2 = grid.n2();
  U.r = grid.r();
  U.a = grid.spec().a;
  U.b = grid.spec().b;
  U.k = basis.k();
  return U;
}

double imaging_value(const ModeBasis& basis, const DataMatrixU& U, const Point3& z) {
  if (U.M != basis.M() || U.N != basis.N() || U.values.rows() != static_cast<Index>(U.dim()) ||
      U.values.cols() != static_cast<Index>(U.dim())) {
    throw Error(ErrorKind::DimensionMismatch, "data matrix does not match the mode basis");
  }
  double total = 0.0;
  for (int l = 0; l < 3; ++l) {
    const Eigen::VectorXcd g = g_vector(basis, z, l);
    total += std::abs((g.transpose() * (U.values * g)).value());
  }
  return total;
}

std::array<int, 3> LatticeSpec::dims() const {
  std::array<int, 3> d{};
  const std::array<const std::array<double, 2>*, 3> axes{&x1, &x2, &x3};
  for (int i = 0; i < 3; ++i) {
    const auto& r = *axes[static_cast<std::size_t>(i)];
    if (!(spacing > 0.0) || !(r[1] >= r[0])) {
      throw Error(ErrorKind::EmptyLattice, "lattice needs spacing > 0 and hi >= lo on every axis");
    }
    d[static_cast<std::size_t>(i)] =
        static_cast<int>(std::floor((r[1] - r[0]) / spacing + 1e-9)) + 1;
  }
  return d;
}

Point3 ImageVolume::point(std::size_t linear) const {
  const auto n0 = static_cast<std::size_t>(dims[0]);
  const auto n1 = static_cast<std::size_t>(dims[1]);
  const int i1 = static_cast<int>(linear % n0);
  const int i2 = static_cast<int>((linear / n0) % n1);
  const int i3 = static_cast<int>(linear / (n0 * n1));
  return point(i1, i2, i3);
}

void ImageVolume::normalize() {
  value.resize(raw.size());
  double peak = 0.0;
  for (double v : raw) peak = std::max(peak, v * v);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    value[i] = peak > 0.0 ? raw[i] * raw[i] / peak : 0.0;
  }
}

ImageVolume image_volume(const ModeBasis& basis, const DataMatrixU& U,
                         const LatticeSpec& lattice) {
  lattice.dims();
  if (!(lattice.x3[1] < 0.0) || !(lattice.x3[0] > U.r)) {
    std::ostringstream os;
    os << "imaging lattice must satisfy r < x3 < 0 (r=" << U.r << ")";
    throw Error(ErrorKind::EmptyLattice, os.str());
  }
  return sample_volume(lattice,
                       [&](const Point3& z) { return imaging_value(basis, U, z); });
}

ImageVolume psf_volume(const ModeBasis& basis, const Point3& x_star,
                       const LatticeSpec& lattice) {
  return sample_volume(lattice, [&](const Point3& z) {
    return std::sqrt(psf_value(basis, x_star, z));
  });
}

DataMatrixU add_noise(const DataMatrixU& U, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) {
    throw Error(ErrorKind::ValidationError, "noise level must be non-negative");
  }
  DataMatrixU out = U;
  out.noise_level = level;
  out.seed = seed;
  if (level == 0.0) return out;
  const double n = static_cast<double>(U.dim());
  const double scale = level * U.values.norm() / std::sqrt(2.0 * n * n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < out.values.rows(); ++i) {
    for (Index j = 0; j < out.values.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      out.values(i, j) += scale * cplx(re, im);
    }
  }
  return out;
}

}  // namespace wgimg
