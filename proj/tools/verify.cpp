#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wgimg::tool {

namespace {

FieldList random_tangential(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  FieldList out(n);
  for (CVec3& f : out) f << cplx(d(rng), d(rng)), cplx(d(rng), d(rng)), 0.0;
  return out;
}

FieldList random_field(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  FieldList out(n);
  for (CVec3& f : out) f << cplx(d(rng), d(rng)), cplx(d(rng), d(rng)), cplx(d(rng), d(rng));
  return out;
}

CheckResult orthogonality(const ModeBasis& basis, const MeasurementGrid& grid) {
  const double k = basis.k();
  const double w = grid.weight();
  const auto te = basis.propagating_te();
  const auto tm = basis.propagating_tm();
  std::vector<Point3> ym;
  for (const Point3& y : grid.nodes()) ym.push_back(mirror_point(y));

  auto sample = [&](const ModeIndex& m, bool tm_pq) {
    std::vector<CVec3> v;
    for (const Point3& y : ym) {
      v.push_back(tm_pq ? CVec3(eval_mode_field(m, basis.spec(), k, y, ModeField::P) -
                                eval_mode_field(m, basis.spec(), k, y, ModeField::Q))
                        : eval_mode_field(m, basis.spec(), k, y, ModeField::M));
    }
    return v;
  };
  auto sample_p = [&](const ModeIndex& m) {
    std::vector<CVec3> v;
    for (const Point3& y : ym) v.push_back(eval_mode_field(m, basis.spec(), k, y, ModeField::P));
    return v;
  };
  auto inner = [&](const std::vector<CVec3>& a, const std::vector<CVec3>& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
    return w * std::conj(s);  // sum a . conj(b)
  };

  double worst = 0.0;
  std::vector<std::vector<CVec3>> te_s;
  for (const ModeIndex& m : te) te_s.push_back(sample(m, false));
  for (std::size_t i = 0; i < te.size(); ++i) {
    const double scale = te[i].cutoff * te[i].cutoff;
    for (std::size_t j = 0; j < te.size(); ++j) {
      const double want = i == j ? scale : 0.0;
      worst = std::max(worst, std::abs(inner(te_s[i], te_s[j]) - want) / scale);
    }
  }
  std::vector<std::vector<CVec3>> pq_s;
  std::vector<std::vector<CVec3>> p_s;
  for (const ModeIndex& n : tm) {
    pq_s.push_back(sample(n, true));
    p_s.push_back(sample_p(n));
  }
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const double g = tm[i].axial.real();
    const double scale = tm[i].cutoff * tm[i].cutoff * g * g / (k * k);
    for (std::size_t j = 0; j < tm.size(); ++j) {
      const double want = i == j ? scale : 0.0;
      worst = std::max(worst, std::abs(inner(pq_s[i], p_s[j]) - want) / scale);
    }
  }
  return {"orthogonality", worst, 1e-10};
}

CheckResult psf_identity(const ModeBasis& basis, const GreenEvaluator& green,
                         const RunConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u1(0.05 * cfg.spec.a, 0.95 * cfg.spec.a);
  std::uniform_real_distribution<double> u2(0.05 * cfg.spec.b, 0.95 * cfg.spec.b);
  std::uniform_real_distribution<double> u3(cfg.r * 0.9, cfg.r * 0.1);
  double worst = 0.0;
  int done = 0;
  while (done < 20) {
    const Point3 x{u1(rng), u2(rng), u3(rng)};
    const Point3 z{u1(rng), u2(rng), u3(rng)};
    if (std::abs(x.x3 - z.x3) < green.min_axial_gap()) continue;
    for (int j = 0; j < 3; ++j) {
      const Vec3 a = h_psi_modal(basis, x, z, j);
      const Vec3 b = green.re_dgreen_propagating(x, z, j);
      worst = std::max(worst, (a - b).norm() / std::max(b.norm(), 1e-300));
    }
    ++done;
  }
  return {"h_psi_vs_green_derivative", worst, 1e-10};
}

CheckResult adjointness(const GreenEvaluator& green, const RunConfig& cfg,
                        const MeasurementGrid& grid, std::mt19937_64& rng) {
  const auto vox = cfg.scene.voxels();
  const FieldList g = random_tangential(grid.size(), rng);
  const FieldList v = random_field(vox.size(), rng);
  std::vector<Point3> centers;
  for (const Voxel& x : vox) centers.push_back(x.center);
  const FieldList hg = herglotz_field(green, grid, g, centers);
  const FieldList hv = adjoint_field(green, v, cfg.scene, grid);
  cplx lhs = 0.0;
  for (std::size_t i = 0; i < vox.size(); ++i) lhs += vox[i].volume * hg[i].dot(v[i]);
  cplx rhs = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) rhs += grid.weight() * g[i].dot(hv[i]);
  return {"adjointness", std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300), 1e-8};
}

}  // namespace

std::vector<CheckResult> run_checks(const RunConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ModeBasis basis = cfg.basis();
  const GreenEvaluator green(basis, cfg.axial_gap());
  const MeasurementGrid grid = cfg.grid();

  std::vector<CheckResult> out;
  out.push_back(orthogonality(basis, grid));
  out.push_back(psf_identity(basis, green, cfg, rng));
  if (!cfg.scene.empty()) {
    out.push_back(adjointness(green, cfg, grid, rng));
    const PointSourceData data = synthesize_data(green, cfg.scene, grid, cfg.model);
    const double threshold =
        cfg.model.kind == ForwardModel::Kind::Born ? 1e-8 : 10.0 * cfg.model.tol;
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      const FieldList g = random_tangential(grid.size(), rng);
      worst = std::max(worst,
                       factorization_residual(green, cfg.scene, grid, cfg.model, data, g));
    }
    out.push_back({"factorization", worst, threshold});
  }
  return out;
}

}  // namespace wgimg::tool
