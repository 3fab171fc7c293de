#pragma once

#include <cstddef>
#include <vector>

#include "wgimg/modes.hpp"

namespace wgimg {

/// Which axial coordinate a Green-function derivative is taken in.
enum class AxialVariable { X3, Y3 };

/// Dyadic Green functions of the full and the terminating waveguide as
/// truncated modal series over a ModeBasis.
///
/// Every evaluation requires |x3 - y3| >= min_axial_gap: the series split by
/// the sign of x3 - y3 and there is no near-source treatment. Read-only after
/// construction and safe to share between threads.
class GreenEvaluator {
 public:
  /// A field or source point with its transverse trig tables precomputed.
  struct Site {
    Point3 p;
    TransverseTable table;
  };

  GreenEvaluator(ModeBasis basis, double min_axial_gap);

  const ModeBasis& basis() const { return basis_; }
  double min_axial_gap() const { return min_gap_; }
  double k() const { return basis_.k(); }

  Site make_site(const Point3& p) const;

  /// Full (two-sided) waveguide Green function.
  CMat3 full(const Point3& x, const Point3& y) const;

  /// Terminating-waveguide Green function; needs x3, y3 < 0.
  CMat3 half(const Point3& x, const Point3& y) const;
  CMat3 half(const Site& x, const Site& y) const;

  /// Term-wise axial derivative of `half`.
  CMat3 half_derivative(const Point3& x, const Point3& y, AxialVariable var) const;

  /// Same as half/half_derivative restricted to propagating modes.
  CMat3 half_propagating(const Point3& x, const Point3& y) const;
  CMat3 half_derivative_propagating(const Point3& x, const Point3& y,
                                    AxialVariable var) const;

  /// Re[d G(x*, z)] e_j over propagating modes, differentiated in x*_3 when
  /// x*_3 < z3 and in z3 otherwise.
  Vec3 re_dgreen_propagating(const Point3& x_star, const Point3& z, int j) const;

  /// Number of (TE + TM) modal terms the half series uses for this pair.
  std::size_t term_count(const Point3& x, const Point3& y, bool propagating_only) const;

  /// c_m = i / (2 h_m lambda_m^2) and d_n = -i / (2 g_n mu_n^2).
  cplx te_coefficient(std::size_t m) const { return c_[m]; }
  cplx tm_coefficient(std::size_t n) const { return d_[n]; }

 private:
  enum class Series { Full, Half };
  struct Request {
    Series series = Series::Half;
    bool derivative = false;
    AxialVariable var = AxialVariable::X3;
    bool propagating_only = false;
  };

  void check_pair(const Point3& x, const Point3& y, bool half) const;
  CMat3 evaluate(const Site& x, const Site& y, const Request& req,
                 std::size_t* terms = nullptr) const;

  ModeBasis basis_;
  double min_gap_;
  std::vector<cplx> c_;
  std::vector<cplx> d_;
};

/// Unit vector e_j for j in {0, 1, 2}.
inline Vec3 unit_vector(int j) {
  Vec3 e = Vec3::Zero();
  e[j] = 1.0;
  return e;
}

}  // namespace wgimg
