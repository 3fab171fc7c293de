#include "wgimg/modes.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

namespace wgimg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CutoffResonance: return "CutoffResonance";
    case ErrorKind::InvalidGeometry: return "InvalidGeometry";
    case ErrorKind::FamilyMismatch: return "FamilyMismatch";
    case ErrorKind::CoincidentAxialPlanes: return "CoincidentAxialPlanes";
    case ErrorKind::PointOutsideHalfGuide: return "PointOutsideHalfGuide";
    case ErrorKind::SeparationViolated: return "SeparationViolated";
    case ErrorKind::LSDiverged: return "LSDiverged";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyLattice: return "EmptyLattice";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

void WaveguideSpec::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    std::ostringstream os;
    os << "waveguide cross-section must have a > 0 and b > 0 (got a=" << a
       << ", b=" << b << ")";
    throw Error(ErrorKind::InvalidGeometry, os.str());
  }
}

EvanescentPolicy EvanescentPolicy::decay(double min_axial_gap, double threshold,
                                         std::size_t cap) {
  if (!(min_axial_gap > 0.0) || !(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorKind::InvalidGeometry,
                "evanescent policy needs min_axial_gap > 0 and 0 < threshold < 1");
  }
  EvanescentPolicy p;
  p.decay_ = true;
  p.min_axial_gap_ = min_axial_gap;
  p.threshold_ = threshold;
  p.cap_ = cap;
  return p;
}

EvanescentPolicy EvanescentPolicy::fixed_count(std::size_t per_family) {
  EvanescentPolicy p;
  p.decay_ = false;
  p.fixed_ = per_family;
  return p;
}

cplx axial_wavenumber(double k, double cutoff) {
  const double tol = 1e-12 * std::max(k, 1.0);
  if (std::abs(k - cutoff) <= tol) {
    std::ostringstream os;
    os.precision(17);
    os << "wavenumber k=" << k << " coincides with cutoff " << cutoff;
    throw Error(ErrorKind::CutoffResonance, os.str());
  }
  const double d = k * k - cutoff * cutoff;
  if (d > 0.0) return {std::sqrt(d), 0.0};
  return {0.0, std::sqrt(-d)};
}

double transverse_normalizer(const ModeIndex& mode, const WaveguideSpec& spec) {
  const double g1 = mode.p1 == 0 ? 1.0 : 0.5;
  const double g2 = mode.p2 == 0 ? 1.0 : 0.5;
  return spec.a * spec.b * g1 * g2;
}

namespace {

double inv_sqrt_normalizer(int p1, int p2, const WaveguideSpec& spec) {
  const double g1 = p1 == 0 ? 1.0 : 0.5;
  const double g2 = p2 == 0 ? 1.0 : 0.5;
  return 1.0 / std::sqrt(spec.a * spec.b * g1 * g2);
}

double cutoff_sq(int p1, int p2, const WaveguideSpec& spec) {
  const double s1 = p1 * kPi / spec.a;
  const double s2 = p2 * kPi / spec.b;
  return s1 * s1 + s2 * s2;
}

struct Candidate {
  int p1;
  int p2;
  double c2;
};

bool cutoff_less(const Candidate& l, const Candidate& r) {
  const double scale = std::max({l.c2, r.c2, 1e-300});
  if (std::abs(l.c2 - r.c2) > 1e-12 * scale) return l.c2 < r.c2;
  if (l.p1 != r.p1) return l.p1 < r.p1;
  return l.p2 < r.p2;
}

std::vector<Candidate> lattice_within(const WaveguideSpec& spec, Family family,
                                      double radius) {
  std::vector<Candidate> out;
  const int lo = family == Family::TE ? 0 : 1;
  const int n1 = static_cast<int>(std::floor(radius * spec.a / kPi)) + 1;
  const int n2 = static_cast<int>(std::floor(radius * spec.b / kPi)) + 1;
  const double r2 = radius * radius;
  for (int p1 = lo; p1 <= n1; ++p1) {
    for (int p2 = lo; p2 <= n2; ++p2) {
      if (family == Family::TE && p1 == 0 && p2 == 0) continue;
      const double c2 = cutoff_sq(p1, p2, spec);
      if (c2 <= r2) out.push_back({p1, p2, c2});
    }
  }
  return out;
}

std::vector<ModeIndex> enumerate_family(const WaveguideSpec& spec, double k,
                                        const EvanescentPolicy& policy,
                                        Family family) {
  // Radius beyond which the policy never keeps a mode.
  double limit = 0.0;
  if (policy.is_decay()) {
    const double decay = -std::log(policy.threshold()) / policy.min_axial_gap();
    limit = std::sqrt(k * k + decay * decay);
  } else {
    limit = std::numeric_limits<double>::infinity();
  }

  const double tol = 1e-12 * std::max(k, 1.0);
  std::size_t propagating = 0;
  std::vector<Candidate> cands;
  // Grow the search radius until it either covers the policy limit or
  // contains enough modes to satisfy the count/cap.
  double radius = std::max(2.0 * k, 4.0 * kPi / std::min(spec.a, spec.b));
  for (;;) {
    const double r = std::min(radius, limit);
    cands = lattice_within(spec, family, std::max(r, k + 2.0 * tol));
    propagating = static_cast<std::size_t>(std::count_if(
        cands.begin(), cands.end(),
        [&](const Candidate& c) { return std::sqrt(c.c2) < k; }));
    std::size_t wanted = policy.is_decay() ? policy.cap()
                                           : propagating + policy.fixed();
    wanted = std::max(wanted, propagating);
    if (r >= limit || cands.size() > wanted) break;
    radius *= 1.5;
  }

  std::sort(cands.begin(), cands.end(), cutoff_less);

  std::size_t keep = cands.size();
  if (policy.is_decay()) {
    keep = std::min(keep, std::max(policy.cap(), propagating));
  } else {
    keep = std::min(keep, propagating + policy.fixed());
  }

  std::vector<ModeIndex> modes;
  modes.reserve(keep);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const double cutoff = std::sqrt(cands[i].c2);
    if (std::abs(k - cutoff) <= tol) {
      std::ostringstream os;
      os.precision(17);
      os << "wavenumber k=" << k << " coincides with the cutoff of "
         << (family == Family::TE ? "TE" : "TM") << " mode (" << cands[i].p1
         << "," << cands[i].p2 << ")";
      throw Error(ErrorKind::CutoffResonance, os.str());
    }
    if (i >= keep) continue;
    ModeIndex m;
    m.family = family;
    m.p1 = cands[i].p1;
    m.p2 = cands[i].p2;
    m.linear = i;
    m.cutoff = cutoff;
    m.axial = axial_wavenumber(k, cutoff);
    m.propagating = cutoff < k;
    modes.push_back(m);
  }
  return modes;
}

}  // namespace

ModeBasis::ModeBasis(WaveguideSpec spec, double k, EvanescentPolicy policy,
                     std::vector<ModeIndex> te, std::vector<ModeIndex> tm)
    : spec_(spec), k_(k), policy_(policy), te_(std::move(te)), tm_(std::move(tm)) {
  for (const auto* fam : {&te_, &tm_}) {
    for (const ModeIndex& m : *fam) {
      max_p1_ = std::max(max_p1_, m.p1);
      max_p2_ = std::max(max_p2_, m.p2);
      if (m.propagating) {
        max_prop_index_ = std::max({max_prop_index_, m.p1, m.p2});
      }
    }
  }
  M_ = static_cast<std::size_t>(
      std::count_if(te_.begin(), te_.end(), [](const ModeIndex& m) { return m.propagating; }));
  N_ = static_cast<std::size_t>(
      std::count_if(tm_.begin(), tm_.end(), [](const ModeIndex& m) { return m.propagating; }));
}

ModeBasis ModeBasis::propagating_subset() const {
  std::vector<ModeIndex> te(te_.begin(), te_.begin() + static_cast<std::ptrdiff_t>(M_));
  std::vector<ModeIndex> tm(tm_.begin(), tm_.begin() + static_cast<std::ptrdiff_t>(N_));
  return ModeBasis(spec_, k_, EvanescentPolicy::propagating_only(), std::move(te),
                   std::move(tm));
}

ModeBasis enumerate_modes(const WaveguideSpec& spec, double k,
                          const EvanescentPolicy& policy) {
  spec.validate();
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(ErrorKind::InvalidGeometry, "wavenumber k must be positive");
  }
  auto te = enumerate_family(spec, k, policy, Family::TE);
  auto tm = enumerate_family(spec, k, policy, Family::TM);
  return ModeBasis(spec, k, policy, std::move(te), std::move(tm));
}

TransverseTE te_transverse(int p1, int p2, const WaveguideSpec& spec, double x1,
                           double x2) {
  const double al = p1 * kPi / spec.a;
  const double be = p2 * kPi / spec.b;
  const double c = inv_sqrt_normalizer(p1, p2, spec);
  // u = c cos(al x1) cos(be x2); t = (d2 u, -d1 u)
  return {-c * be * std::cos(al * x1) * std::sin(be * x2),
          c * al * std::sin(al * x1) * std::cos(be * x2)};
}

TransverseTM tm_transverse(int p1, int p2, const WaveguideSpec& spec, double x1,
                           double x2) {
  const double al = p1 * kPi / spec.a;
  const double be = p2 * kPi / spec.b;
  const double c = inv_sqrt_normalizer(p1, p2, spec);
  return {c * al * std::cos(al * x1) * std::sin(be * x2),
          c * be * std::sin(al * x1) * std::cos(be * x2),
          c * std::sin(al * x1) * std::sin(be * x2)};
}

CVec3 eval_mode_field(const ModeIndex& mode, const WaveguideSpec& spec, double k,
                      const Point3& x, ModeField which) {
  const bool te_field = which == ModeField::M;
  if (te_field != (mode.family == Family::TE)) {
    throw Error(ErrorKind::FamilyMismatch,
                mode.family == Family::TE
                    ? "TE modes only carry the M field"
                    : "TM modes only carry the P and Q fields");
  }
  const cplx phase = std::exp(kI * mode.axial * x.x3);
  if (te_field) {
    const TransverseTE t = te_transverse(mode.p1, mode.p2, spec, x.x1, x.x2);
    return CVec3(t.t1 * phase, t.t2 * phase, 0.0);
  }
  const TransverseTM t = tm_transverse(mode.p1, mode.p2, spec, x.x1, x.x2);
  if (which == ModeField::P) {
    const cplx f = kI * mode.axial / k * phase;
    return CVec3(f * t.d1, f * t.d2, 0.0);
  }
  const double mu2 = mode.cutoff * mode.cutoff;
  return CVec3(0.0, 0.0, mu2 / k * t.v * phase);
}

TransverseTable::TransverseTable(const WaveguideSpec& spec, int max_p1, int max_p2,
                                 double x1, double x2)
    : a_(spec.a),
      b_(spec.b),
      c1_(max_p1 + 1),
      s1_(max_p1 + 1),
      c2_(max_p2 + 1),
      s2_(max_p2 + 1) {
  for (int p = 0; p <= max_p1; ++p) {
    c1_[p] = std::cos(p * kPi * x1 / a_);
    s1_[p] = std::sin(p * kPi * x1 / a_);
  }
  for (int p = 0; p <= max_p2; ++p) {
    c2_[p] = std::cos(p * kPi * x2 / b_);
    s2_[p] = std::sin(p * kPi * x2 / b_);
  }
}

TransverseTE TransverseTable::te(int p1, int p2) const {
  const double al = p1 * kPi / a_;
  const double be = p2 * kPi / b_;
  const double g1 = p1 == 0 ? 1.0 : 0.5;
  const double g2 = p2 == 0 ? 1.0 : 0.5;
  const double c = 1.0 / std::sqrt(a_ * b_ * g1 * g2);
  return {-c * be * c1_[p1] * s2_[p2], c * al * s1_[p1] * c2_[p2]};
}

TransverseTM TransverseTable::tm(int p1, int p2) const {
  const double al = p1 * kPi / a_;
  const double be = p2 * kPi / b_;
  const double c = 2.0 / std::sqrt(a_ * b_);
  return {c * al * c1_[p1] * s2_[p2], c * be * s1_[p1] * c2_[p2],
          c * s1_[p1] * s2_[p2]};
}

}  // namespace wgimg
