#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wgimg/types.hpp"

namespace wgimg {

/// Rectangular cross-section (0,a) x (0,b) of the terminating guide.
struct WaveguideSpec {
  double a = 0.0;
  double b = 0.0;

  /// Throws InvalidGeometry unless a > 0 and b > 0.
  void validate() const;

  bool contains_transverse(double x1, double x2, double tol = 1e-12) const {
    return x1 >= -tol && x1 <= a + tol && x2 >= -tol && x2 <= b + tol;
  }
};

/// TE modes are the M-type fields built from cos*cos eigenfunctions; TM modes
/// are the (P, Q) pair built from sin*sin eigenfunctions.
enum class Family { TE, TM };
enum class ModeField { M, P, Q };

struct ModeIndex {
  Family family = Family::TE;
  int p1 = 0;
  int p2 = 0;
  std::size_t linear = 0;  // position inside its family after sorting
  double cutoff = 0.0;     // lambda_m (TE) or mu_n (TM)
  cplx axial;              // h_m or g_n, Im >= 0
  bool propagating = false;
};

/// How many evanescent modes a basis keeps beyond the propagating ones.
class EvanescentPolicy {
 public:
  /// Keep evanescent modes while exp(-|Im axial| * min_axial_gap) >= threshold,
  /// never more than `cap` modes per family.
  static EvanescentPolicy decay(double min_axial_gap, double threshold = 1e-12,
                                std::size_t cap = 5000);
  /// Keep exactly `per_family` evanescent modes per family.
  static EvanescentPolicy fixed_count(std::size_t per_family);
  static EvanescentPolicy propagating_only() { return fixed_count(0); }

  bool is_decay() const { return decay_; }
  double min_axial_gap() const { return min_axial_gap_; }
  double threshold() const { return threshold_; }
  std::size_t cap() const { return cap_; }
  std::size_t fixed() const { return fixed_; }

 private:
  bool decay_ = false;
  double min_axial_gap_ = 0.0;
  double threshold_ = 1e-12;
  std::size_t cap_ = 5000;
  std::size_t fixed_ = 0;
};

/// Transverse part of a TE field, (d2 u, -d1 u) for the unit-normalized u.
struct TransverseTE {
  double t1 = 0.0;
  double t2 = 0.0;
};

/// Transverse data of a TM field: gradient of the unit-normalized v and v.
struct TransverseTM {
  double d1 = 0.0;
  double d2 = 0.0;
  double v = 0.0;
};

/// Enumerated and sorted TE / TM modes at a fixed wavenumber. Propagating
/// modes come first in each family (they have the smallest cutoffs).
class ModeBasis {
 public:
  ModeBasis(WaveguideSpec spec, double k, EvanescentPolicy policy,
            std::vector<ModeIndex> te, std::vector<ModeIndex> tm);

  const WaveguideSpec& spec() const { return spec_; }
  double k() const { return k_; }
  const EvanescentPolicy& policy() const { return policy_; }

  std::span<const ModeIndex> te_modes() const { return te_; }
  std::span<const ModeIndex> tm_modes() const { return tm_; }
  std::span<const ModeIndex> propagating_te() const {
    return std::span<const ModeIndex>(te_).first(M_);
  }
  std::span<const ModeIndex> propagating_tm() const {
    return std::span<const ModeIndex>(tm_).first(N_);
  }

  std::size_t M() const { return M_; }
  std::size_t N() const { return N_; }

  /// Largest p1 / p2 over all retained modes.
  int max_p1() const { return max_p1_; }
  int max_p2() const { return max_p2_; }
  /// Largest transverse index over the propagating modes only.
  int max_propagating_index() const { return max_prop_index_; }

  /// Same geometry and wavenumber, evanescent modes dropped.
  ModeBasis propagating_subset() const;

 private:
  WaveguideSpec spec_;
  double k_;
  EvanescentPolicy policy_;
  std::vector<ModeIndex> te_;
  std::vector<ModeIndex> tm_;
  std::size_t M_ = 0;
  std::size_t N_ = 0;
  int max_p1_ = 0;
  int max_p2_ = 0;
  int max_prop_index_ = 0;
};

ModeBasis enumerate_modes(const WaveguideSpec& spec, double k,
                          const EvanescentPolicy& policy);

/// sqrt(k^2 - cutoff^2) on the branch Im >= 0. Throws CutoffResonance when
/// |k - cutoff| <= 1e-12 * max(k, 1).
cplx axial_wavenumber(double k, double cutoff);

/// Integral over the cross-section of the squared unnormalized eigenfunction:
/// a*b*g1*g2 with g = 1 for a zero index and 1/2 otherwise.
double transverse_normalizer(const ModeIndex& mode, const WaveguideSpec& spec);

TransverseTE te_transverse(int p1, int p2, const WaveguideSpec& spec, double x1,
                           double x2);
TransverseTM tm_transverse(int p1, int p2, const WaveguideSpec& spec, double x1,
                           double x2);

/// M, P or Q field of a mode (normalized eigenfunctions), including the
/// axial factor exp(i * axial * x3). Throws FamilyMismatch for M on a TM mode
/// or P/Q on a TE mode.
CVec3 eval_mode_field(const ModeIndex& mode, const WaveguideSpec& spec, double k,
                      const Point3& x, ModeField which);

/// Per-point cache of cos/sin(p pi x / L) used when many modes are summed at
/// the same transverse position.
class TransverseTable {
 public:
  TransverseTable() = default;
  TransverseTable(const WaveguideSpec& spec, int max_p1, int max_p2, double x1,
                  double x2);

  TransverseTE te(int p1, int p2) const;
  TransverseTM tm(int p1, int p2) const;

 private:
  double a_ = 1.0;
  double b_ = 1.0;
  std::vector<double> c1_, s1_, c2_, s2_;
};

}  // namespace wgimg
