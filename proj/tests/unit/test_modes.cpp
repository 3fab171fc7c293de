#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "oracles.hpp"
#include "wgimg/operators.hpp"

using namespace wgimg;

namespace {

const WaveguideSpec kSquare{10.0, 10.0};

ModeBasis propagating(double k, WaveguideSpec spec = kSquare) {
  return enumerate_modes(spec, k, EvanescentPolicy::propagating_only());
}

}  // namespace

TEST(ModeCounts, ReferenceWavenumbers) {
  const ModeBasis k1 = propagating(1.0);
  EXPECT_EQ(k1.M(), 12u);
  EXPECT_EQ(k1.N(), 6u);
  const ModeBasis k3 = propagating(3.0);
  EXPECT_EQ(k3.M(), 82u);
  EXPECT_EQ(k3.N(), 64u);
  EXPECT_EQ(k3.M() + k3.N(), 146u);
  const ModeBasis k5 = propagating(5.0);
  EXPECT_EQ(k5.M(), 213u);
  EXPECT_EQ(k5.N(), 183u);
}

TEST(ModeCounts, MatchBruteForceLattice) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> side(1.0, 20.0);
  std::uniform_real_distribution<double> wave(0.3, 8.0);
  int done = 0;
  while (done < 50) {
    const WaveguideSpec spec{side(rng), side(rng)};
    const double k = wave(rng);
    ModeBasis basis = propagating(1.0);
    try {
      basis = propagating(k, spec);
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::CutoffResonance);
      continue;
    }
    const auto [M, N] = oracle::count_propagating(spec.a, spec.b, k);
    EXPECT_EQ(basis.M(), M) << "a=" << spec.a << " b=" << spec.b << " k=" << k;
    EXPECT_EQ(basis.N(), N) << "a=" << spec.a << " b=" << spec.b << " k=" << k;
    ++done;
  }
}

TEST(ModeBasisOrder, SortedWithLexicographicTies) {
  const ModeBasis basis = enumerate_modes(kSquare, 3.0, EvanescentPolicy::fixed_count(40));
  for (auto modes : {basis.te_modes(), basis.tm_modes()}) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      EXPECT_EQ(modes[i].linear, i);
      const double c2 = std::pow(modes[i].p1 * oracle::pi / 10, 2) +
                        std::pow(modes[i].p2 * oracle::pi / 10, 2);
      EXPECT_NEAR(modes[i].cutoff * modes[i].cutoff, c2, 1e-12 * c2);
      if (i == 0) continue;
      EXPECT_LE(modes[i - 1].cutoff, modes[i].cutoff * (1 + 1e-12));
      if (std::abs(modes[i - 1].cutoff - modes[i].cutoff) < 1e-12 * modes[i].cutoff) {
        EXPECT_TRUE(std::pair(modes[i - 1].p1, modes[i - 1].p2) <
                    std::pair(modes[i].p1, modes[i].p2));
      }
    }
  }
  // Square guide: (1,2) and (2,1) tie, (1,2) first.
  EXPECT_EQ(basis.te_modes()[2].p1, 1);
  EXPECT_EQ(basis.te_modes()[2].p2, 1);
  EXPECT_EQ(basis.te_modes()[5].p1, 1);
  EXPECT_EQ(basis.te_modes()[5].p2, 2);
  EXPECT_EQ(basis.te_modes()[6].p1, 2);
  EXPECT_EQ(basis.te_modes()[6].p2, 1);
}

TEST(ModeBasisOrder, FamiliesAndPropagationFlags) {
  const ModeBasis basis = enumerate_modes(kSquare, 3.0, EvanescentPolicy::fixed_count(25));
  std::size_t M = 0;
  for (const ModeIndex& m : basis.te_modes()) {
    EXPECT_EQ(m.family, Family::TE);
    EXPECT_FALSE(m.p1 == 0 && m.p2 == 0);
    EXPECT_GE(m.axial.imag(), 0.0);
    const cplx sq = m.axial * m.axial;
    EXPECT_NEAR(sq.real(), 9.0 - m.cutoff * m.cutoff, 1e-12 * (9.0 + m.cutoff * m.cutoff));
    EXPECT_NEAR(sq.imag(), 0.0, 1e-12);
    EXPECT_EQ(m.propagating, m.axial.imag() == 0.0);
    M += m.propagating;
  }
  std::size_t N = 0;
  for (const ModeIndex& n : basis.tm_modes()) {
    EXPECT_EQ(n.family, Family::TM);
    EXPECT_GE(n.p1, 1);
    EXPECT_GE(n.p2, 1);
    EXPECT_EQ(n.propagating, n.axial.imag() == 0.0);
    N += n.propagating;
  }
  EXPECT_EQ(M, basis.M());
  EXPECT_EQ(N, basis.N());
  EXPECT_EQ(basis.te_modes().size(), basis.M() + 25);
  EXPECT_EQ(basis.tm_modes().size(), basis.N() + 25);
}

TEST(EvanescentPolicy, DecayKeepsExactlyTheModesAboveThreshold) {
  const double gap = 2.0;
  const ModeBasis basis = enumerate_modes(kSquare, 3.0, EvanescentPolicy::decay(gap));
  const ModeBasis wide = enumerate_modes(kSquare, 3.0, EvanescentPolicy::fixed_count(3000));
  for (auto [kept, all] : {std::pair(basis.te_modes(), wide.te_modes()),
                           std::pair(basis.tm_modes(), wide.tm_modes())}) {
    ASSERT_LT(kept.size(), all.size());
    for (const ModeIndex& m : kept) EXPECT_GE(std::exp(-m.axial.imag() * gap), 1e-12);
    EXPECT_LT(std::exp(-all[kept.size()].axial.imag() * gap), 1e-12);
  }
}

TEST(EvanescentPolicy, CapLimitsEachFamily) {
  const ModeBasis basis = enumerate_modes(kSquare, 3.0, EvanescentPolicy::decay(0.01, 1e-12, 300));
  EXPECT_EQ(basis.te_modes().size(), 300u);
  EXPECT_EQ(basis.tm_modes().size(), 300u);
}

TEST(AxialWavenumber, Branches) {
  EXPECT_EQ(axial_wavenumber(3.0, 0.0), cplx(3.0, 0.0));
  const cplx ev = axial_wavenumber(3.0, 5.0);
  EXPECT_DOUBLE_EQ(ev.real(), 0.0);
  EXPECT_DOUBLE_EQ(ev.imag(), 4.0);
  const cplx h = axial_wavenumber(1.0, oracle::pi / 10);
  EXPECT_NEAR(h.real(), 0.949370, 5e-7);
  EXPECT_EQ(h.imag(), 0.0);
}

TEST(AxialWavenumber, ResonanceIsRejected) {
  const double c = oracle::pi / 10;
  for (double k : {c, c * (1 + 5e-13), c * (1 - 5e-13)}) {
    try {
      axial_wavenumber(k, c);
      FAIL() << "no error for k=" << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::CutoffResonance);
    }
  }
  EXPECT_NO_THROW(axial_wavenumber(c * (1 + 1e-9), c));
  try {
    enumerate_modes(kSquare, std::sqrt(2.0) * oracle::pi / 10, EvanescentPolicy::fixed_count(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CutoffResonance);
  }
}

TEST(Geometry, InvalidSpecIsRejected) {
  for (WaveguideSpec s : {WaveguideSpec{0.0, 1.0}, WaveguideSpec{1.0, -2.0},
                          WaveguideSpec{std::numeric_limits<double>::quiet_NaN(), 1.0}}) {
    try {
      enumerate_modes(s, 1.0, EvanescentPolicy::propagating_only());
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidGeometry);
    }
  }
}

TEST(MirrorPoint, Involution) {
  EXPECT_EQ(mirror_point({1, 2, -3}), (Point3{1, 2, 3}));
  EXPECT_EQ(mirror_point({0, 0, 0}), (Point3{0, 0, 0}));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Point3 p = oracle::random_point(rng, 10, 10, -20, 20);
    EXPECT_EQ(mirror_point(mirror_point(p)), p);
  }
}

TEST(TransverseNormalizer, ClosedForms) {
  ModeIndex m;
  m.family = Family::TE;
  m.p1 = 1;
  m.p2 = 0;
  EXPECT_DOUBLE_EQ(transverse_normalizer(m, kSquare), 50.0);
  m.p2 = 1;
  EXPECT_DOUBLE_EQ(transverse_normalizer(m, kSquare), 25.0);
  m.family = Family::TM;
  m.p1 = 2;
  m.p2 = 3;
  EXPECT_DOUBLE_EQ(transverse_normalizer(m, kSquare), 25.0);
}

TEST(ModeField, HandValues) {
  const ModeBasis basis = enumerate_modes(kSquare, 3.0, EvanescentPolicy::fixed_count(10));
  // (0,1) and (1,0) tie; (0,1) sorts first.
  const ModeIndex& te10 = basis.te_modes()[1];
  ASSERT_EQ(te10.p1, 1);
  ASSERT_EQ(te10.p2, 0);
  const CVec3 v = eval_mode_field(te10, kSquare, 3.0, {5, 5, 0}, ModeField::M);
  EXPECT_NEAR(std::abs(v[0]), 0.0, 1e-16);
  EXPECT_NEAR(v[1].real(), 0.0444288, 5e-8);
  EXPECT_NEAR(v[1].real(), oracle::pi / (10 * std::sqrt(50.0)), 1e-15);
  EXPECT_EQ(v[2], cplx(0.0));

  const ModeIndex& tm11 = basis.tm_modes()[0];
  ASSERT_EQ(tm11.p1, 1);
  ASSERT_EQ(tm11.p2, 1);
  const CVec3 q = eval_mode_field(tm11, kSquare, 3.0, {0.0, 3.7, -1.2}, ModeField::Q);
  EXPECT_EQ(q.norm(), 0.0);

  const ModeIndex& te11 = basis.te_modes()[2];
  ASSERT_EQ(te11.p1, 1);
  ASSERT_EQ(te11.p2, 1);
  const Point3 x{5, 5, -2};
  const CVec3 m11 = eval_mode_field(te11, kSquare, 3.0, x, ModeField::M);
  const double c = oracle::pi * std::sqrt(2.0) / 10;
  const cplx h = std::sqrt(9.0 - c * c);
  const double al = oracle::pi / 10;
  const cplx e = std::exp(cplx(0, 1) * h * -2.0) / 5.0;  // 1/sqrt(25)
  EXPECT_NEAR(std::abs(m11[0] - (-al * std::cos(al * 5) * std::sin(al * 5)) * e), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(m11[1] - (al * std::sin(al * 5) * std::cos(al * 5)) * e), 0.0, 1e-16);
}

TEST(ModeField, FamilyMismatch) {
  const ModeBasis basis = propagating(3.0);
  for (auto [mode, which] : {std::pair(basis.te_modes()[0], ModeField::P),
                             std::pair(basis.te_modes()[0], ModeField::Q),
                             std::pair(basis.tm_modes()[0], ModeField::M)}) {
    try {
      eval_mode_field(mode, kSquare, 3.0, {1, 1, -1}, which);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::FamilyMismatch);
    }
  }
}

TEST(ModeField, MatchesOracleFormulas) {
  const WaveguideSpec spec{7.0, 4.0};
  const double k = 2.3;
  const ModeBasis basis = enumerate_modes(spec, k, EvanescentPolicy::fixed_count(30));
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Point3 x = oracle::random_point(rng, spec.a, spec.b, -3, 0);
    for (const ModeIndex& m : basis.te_modes()) {
      const auto o = oracle::mode_of(basis, m);
      const CVec3 want = oracle::M(o, x);
      EXPECT_LE((eval_mode_field(m, spec, k, x, ModeField::M) - want).norm(),
                1e-13 * std::max(1.0, want.norm()));
    }
    for (const ModeIndex& n : basis.tm_modes()) {
      const auto o = oracle::mode_of(basis, n);
      const CVec3 p = oracle::P(o, x);
      const CVec3 q = oracle::Q(o, x);
      EXPECT_LE((eval_mode_field(n, spec, k, x, ModeField::P) - p).norm(),
                1e-13 * std::max(1.0, p.norm()));
      EXPECT_LE((eval_mode_field(n, spec, k, x, ModeField::Q) - q).norm(),
                1e-13 * std::max(1.0, q.norm()));
    }
  }
}

TEST(TransverseTable, AgreesWithDirectEvaluation) {
  const WaveguideSpec spec{6.0, 9.0};
  const ModeBasis basis = enumerate_modes(spec, 2.0, EvanescentPolicy::fixed_count(50));
  const TransverseTable tab(spec, basis.max_p1(), basis.max_p2(), 1.3, 7.1);
  for (const ModeIndex& m : basis.te_modes()) {
    const TransverseTE a = tab.te(m.p1, m.p2);
    const TransverseTE b = te_transverse(m.p1, m.p2, spec, 1.3, 7.1);
    EXPECT_NEAR(a.t1, b.t1, 1e-14);
    EXPECT_NEAR(a.t2, b.t2, 1e-14);
  }
  for (const ModeIndex& n : basis.tm_modes()) {
    const TransverseTM a = tab.tm(n.p1, n.p2);
    const TransverseTM b = tm_transverse(n.p1, n.p2, spec, 1.3, 7.1);
    EXPECT_NEAR(a.d1, b.d1, 1e-14);
    EXPECT_NEAR(a.d2, b.d2, 1e-14);
    EXPECT_NEAR(a.v, b.v, 1e-14);
  }
}

TEST(Orthogonality, MidpointQuadratureOnMeasurementPlane) {
  const double k = 3.0;
  const ModeBasis basis = propagating(k);
  const MeasurementGrid grid(kSquare, -10.0, 24, 24);
  ASSERT_TRUE(grid.nyquist_ok(basis));
  const auto te = basis.propagating_te();
  const auto tm = basis.propagating_tm();
  const std::size_t n = grid.size();
  // Samples at the mirrored nodes y-.
  std::vector<std::vector<CVec3>> m(te.size()), p(tm.size()), pq(tm.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 y = mirror_point(grid.node(i));
    for (std::size_t j = 0; j < te.size(); ++j) {
      m[j].push_back(eval_mode_field(te[j], kSquare, k, y, ModeField::M));
    }
    for (std::size_t j = 0; j < tm.size(); ++j) {
      const CVec3 P = eval_mode_field(tm[j], kSquare, k, y, ModeField::P);
      p[j].push_back(P);
      pq[j].push_back(P - eval_mode_field(tm[j], kSquare, k, y, ModeField::Q));
    }
  }
  auto inner = [&](const std::vector<CVec3>& a, const std::vector<CVec3>& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (a[i].transpose() * b[i].conjugate()).value();
    return s * grid.weight();
  };
  for (std::size_t i = 0; i < te.size(); ++i) {
    const double l2 = te[i].cutoff * te[i].cutoff;
    for (std::size_t j = 0; j < te.size(); ++j) {
      EXPECT_LT(std::abs(inner(m[i], m[j]) - (i == j ? l2 : 0.0)), 1e-10 * l2) << i << "," << j;
    }
  }
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const double g = tm[i].axial.real();
    const double want = tm[i].cutoff * tm[i].cutoff * g * g / (k * k);
    for (std::size_t j = 0; j < tm.size(); ++j) {
      // <conj(P) - conj(Q), conj(P')> pairs (P - Q) against P' without conjugation.
      cplx s = 0.0;
      for (std::size_t q = 0; q < n; ++q) s += (pq[i][q].conjugate().transpose() * p[j][q]).value();
      s *= grid.weight();
      EXPECT_LT(std::abs(s - (i == j ? want : 0.0)), 1e-10 * want) << i << "," << j;
    }
  }
}

TEST(BoundaryCondition, TangentialFieldsVanishOnSideWalls) {
  const WaveguideSpec spec{10.0, 6.0};
  const double k = 3.0;
  const ModeBasis basis = enumerate_modes(spec, k, EvanescentPolicy::fixed_count(40));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int s = 0; s < 40; ++s) {
    const double x3 = -4.0 * t(rng);
    // Wall, outward normal.
    const std::array<std::pair<Point3, Vec3>, 4> walls{{
        {{0.0, spec.b * t(rng), x3}, {-1, 0, 0}},
        {{spec.a, spec.b * t(rng), x3}, {1, 0, 0}},
        {{spec.a * t(rng), 0.0, x3}, {0, -1, 0}},
        {{spec.a * t(rng), spec.b, x3}, {0, 1, 0}},
    }};
    for (const auto& [x, nu] : walls) {
      const CVec3 n = nu.cast<cplx>();
      // Evanescent fields grow like exp(|Im axial| |x3|) into the guide; their
      // bound carries that growth, propagating ones are held to 1e-12 absolute.
      auto bound = [&](const ModeIndex& m) {
        return 1e-12 * std::max(1.0, m.cutoff * std::exp(m.axial.imag() * std::abs(x.x3)));
      };
      for (const ModeIndex& m : basis.te_modes()) {
        EXPECT_LT(n.cross(eval_mode_field(m, spec, k, x, ModeField::M)).norm(), bound(m));
      }
      for (const ModeIndex& m : basis.tm_modes()) {
        const double b = bound(m) * m.cutoff;
        EXPECT_LT(n.cross(eval_mode_field(m, spec, k, x, ModeField::P)).norm(), b);
        EXPECT_LT(n.cross(eval_mode_field(m, spec, k, x, ModeField::Q)).norm(), b);
      }
    }
  }
}

TEST(PdeResidual, ModesSolveTheVectorHelmholtzEquation) {
  const WaveguideSpec spec{10.0, 10.0};
  const double k = 3.0;
  const ModeBasis basis = enumerate_modes(spec, k, EvanescentPolicy::fixed_count(20));
  // Second differences: step eps^(1/4) times the local wavelength.
  const double step = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const Point3 x = oracle::random_point(rng, 10, 10, -5, -1, 0.5);
    auto check = [&](const ModeIndex& m, oracle::VecField F) {
      const double local = 2 * oracle::pi / std::max(k, m.cutoff);
      const CVec3 r = oracle::curl_curl(F, x, step * local) - k * k * F(x);
      const double scale = k * k * F(x).norm() + (m.cutoff * m.cutoff) * F(x).norm();
      if (scale < 1e-12) return;
      EXPECT_LT(r.norm() / scale, 1e-5) << m.p1 << "," << m.p2;
    };
    for (const ModeIndex& m : basis.te_modes()) {
      check(m, [&](const Point3& p) { return eval_mode_field(m, spec, k, p, ModeField::M); });
    }
    for (const ModeIndex& n : basis.tm_modes()) {
      check(n, [&](const Point3& p) {
        return CVec3(eval_mode_field(n, spec, k, p, ModeField::P) +
                     eval_mode_field(n, spec, k, p, ModeField::Q));
      });
    }
  }
}

TEST(Nyquist, GridRequirementFollowsLargestPropagatingIndex) {
  const ModeBasis basis = propagating(3.0);
  EXPECT_EQ(basis.max_propagating_index(), 9);
  EXPECT_TRUE(MeasurementGrid(kSquare, -10, 20, 20).nyquist_ok(basis));
  EXPECT_FALSE(MeasurementGrid(kSquare, -10, 19, 20).nyquist_ok(basis));
  EXPECT_FALSE(MeasurementGrid(kSquare, -10, 16, 16).nyquist_ok(basis));
}
