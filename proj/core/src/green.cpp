#include "wgimg/green.hpp"

#include <cmath>
#include <sstream>

namespace wgimg {

namespace {

// Terms with exp(-|Im axial| * |x3 - y3|) below e^-41.5 (~1e-18) are dropped.
constexpr double kNegligibleExponent = 41.5;

std::string describe(const Point3& p) {
  std::ostringstream os;
  os << "(" << p.x1 << ", " << p.x2 << ", " << p.x3 << ")";
  return os.str();
}

}  // namespace

GreenEvaluator::GreenEvaluator(ModeBasis basis, double min_axial_gap)
    : basis_(std::move(basis)), min_gap_(min_axial_gap) {
  if (!(min_axial_gap > 0.0)) {
    throw Error(ErrorKind::InvalidGeometry, "min_axial_gap must be positive");
  }
  for (const ModeIndex& m : basis_.te_modes()) {
    c_.push_back(kI / (2.0 * m.axial * m.cutoff * m.cutoff));
  }
  for (const ModeIndex& n : basis_.tm_modes()) {
    d_.push_back(-kI / (2.0 * n.axial * n.cutoff * n.cutoff));
  }
}

GreenEvaluator::Site GreenEvaluator::make_site(const Point3& p) const {
  return {p, TransverseTable(basis_.spec(), basis_.max_p1(), basis_.max_p2(), p.x1, p.x2)};
}

void GreenEvaluator::check_pair(const Point3& x, const Point3& y, bool half) const {
  const WaveguideSpec& s = basis_.spec();
  if (half) {
    for (const Point3* p : {&x, &y}) {
      if (!(p->x3 < 0.0) || !s.contains_transverse(p->x1, p->x2, 1e-9)) {
        throw Error(ErrorKind::PointOutsideHalfGuide,
                    "point " + describe(*p) + " is outside the terminating guide");
      }
    }
  }
  const double gap = std::abs(x.x3 - y.x3);
  if (!(gap >= min_gap_ * (1.0 - 1e-12)) || gap == 0.0) {
    std::ostringstream os;
    os << "axial separation " << gap << " between " << describe(x) << " and "
       << describe(y) << " is below the minimum gap " << min_gap_;
    throw Error(ErrorKind::CoincidentAxialPlanes, os.str());
  }
}

CMat3 GreenEvaluator::evaluate(const Site& xs, const Site& ys, const Request& req,
                               std::size_t* terms) const {
  const double k = basis_.k();
  const double x3 = xs.p.x3;
  const double y3 = ys.p.x3;
  const bool upper = x3 > y3;
  const bool half = req.series == Series::Half;
  const double dist = std::abs(x3 - y3);

  // Direct term: exp(i h (sx x3 + sy y3)) with the exponent equal to |x3 - y3|.
  const double dsx = upper ? 1.0 : -1.0;
  const double dsy = -dsx;
  const double d_arg = dsx * x3 + dsy * y3;
  // Image term (half guide only): exp(i h (-x3 - y3)).
  const double i_arg = -x3 - y3;
  const double dsel = req.var == AxialVariable::X3 ? dsx : dsy;
  const double isel = -1.0;

  CMat3 G = CMat3::Zero();
  std::size_t count = 0;

  const auto te = basis_.te_modes();
  for (std::size_t m = 0; m < te.size(); ++m) {
    const ModeIndex& mode = te[m];
    if (!mode.propagating) {
      if (req.propagating_only) break;
      if (mode.axial.imag() * dist > kNegligibleExponent) break;
    }
    const cplx h = mode.axial;
    cplx D = std::exp(kI * h * d_arg);
    cplx I = half ? std::exp(kI * h * i_arg) : cplx(0.0);
    if (req.derivative) {
      D *= kI * h * dsel;
      I *= kI * h * isel;
    }
    const cplx s = c_[m] * (D - I);
    const TransverseTE tx = xs.table.te(mode.p1, mode.p2);
    const TransverseTE ty = ys.table.te(mode.p1, mode.p2);
    G(0, 0) += s * (tx.t1 * ty.t1);
    G(0, 1) += s * (tx.t1 * ty.t2);
    G(1, 0) += s * (tx.t2 * ty.t1);
    G(1, 1) += s * (tx.t2 * ty.t2);
    ++count;
  }

  const auto tm = basis_.tm_modes();
  for (std::size_t n = 0; n < tm.size(); ++n) {
    const ModeIndex& mode = tm[n];
    if (!mode.propagating) {
      if (req.propagating_only) break;
      if (mode.axial.imag() * dist > kNegligibleExponent) break;
    }
    const cplx g = mode.axial;
    cplx D = std::exp(kI * g * d_arg);
    cplx I = half ? std::exp(kI * g * i_arg) : cplx(0.0);
    if (req.derivative) {
      D *= kI * g * dsel;
      I *= kI * g * isel;
    }
    const cplx alpha = kI * g / k;
    const double beta = 1.0 / k;
    const double mu2 = mode.cutoff * mode.cutoff;
    const TransverseTM tx = xs.table.tm(mode.p1, mode.p2);
    const TransverseTM ty = ys.table.tm(mode.p1, mode.p2);
    const double qx = mu2 * tx.v;
    const double qy = mu2 * ty.v;

    CVec3 A;
    CVec3 B;
    if (half) {
      const cplx minus = D - I;
      const cplx plus = D + I;
      if (upper) {
        // ([P(x) - P(x-)] + [Q(x) + Q(x-)]) [P(y-) - Q(y-)]^T
        A << alpha * minus * tx.d1, alpha * minus * tx.d2, beta * plus * qx;
        B << alpha * ty.d1, alpha * ty.d2, -beta * qy;
      } else {
        // [P(x-) - Q(x-)] ([P(y) - P(y-)] + [Q(y) + Q(y-)])^T
        A << alpha * tx.d1, alpha * tx.d2, -beta * qx;
        B << alpha * minus * ty.d1, alpha * minus * ty.d2, beta * plus * qy;
      }
    } else if (upper) {
      // [P(x) + Q(x)] [P(y-) - Q(y-)]^T
      A << alpha * D * tx.d1, alpha * D * tx.d2, beta * D * qx;
      B << alpha * ty.d1, alpha * ty.d2, -beta * qy;
    } else {
      // [P(x-) - Q(x-)] [P(y) + Q(y)]^T
      A << alpha * D * tx.d1, alpha * D * tx.d2, -beta * D * qx;
      B << alpha * ty.d1, alpha * ty.d2, beta * qy;
    }
    G.noalias() += d_[n] * (A * B.transpose());
    ++count;
  }

  if (terms) *terms = count;
  return G;
}

CMat3 GreenEvaluator::full(const Point3& x, const Point3& y) const {
  check_pair(x, y, false);
  return evaluate(make_site(x), make_site(y), {Series::Full});
}

CMat3 GreenEvaluator::half(const Point3& x, const Point3& y) const {
  return half(make_site(x), make_site(y));
}

CMat3 GreenEvaluator::half(const Site& x, const Site& y) const {
  check_pair(x.p, y.p, true);
  return evaluate(x, y, {Series::Half});
}

CMat3 GreenEvaluator::half_derivative(const Point3& x, const Point3& y,
                                      AxialVariable var) const {
  check_pair(x, y, true);
  return evaluate(make_site(x), make_site(y), {Series::Half, true, var, false});
}

CMat3 GreenEvaluator::half_propagating(const Point3& x, const Point3& y) const {
  check_pair(x, y, true);
  return evaluate(make_site(x), make_site(y),
                  {Series::Half, false, AxialVariable::X3, true});
}

CMat3 GreenEvaluator::half_derivative_propagating(const Point3& x, const Point3& y,
                                                  AxialVariable var) const {
  check_pair(x, y, true);
  return evaluate(make_site(x), make_site(y), {Series::Half, true, var, true});
}

Vec3 GreenEvaluator::re_dgreen_propagating(const Point3& x_star, const Point3& z,
                                           int j) const {
  const AxialVariable var = x_star.x3 < z.x3 ? AxialVariable::X3 : AxialVariable::Y3;
  const CMat3 dG = half_derivative_propagating(x_star, z, var);
  return dG.col(j).real();
}

std::size_t GreenEvaluator::term_count(const Point3& x, const Point3& y,
                                       bool propagating_only) const {
  check_pair(x, y, true);
  std::size_t n = 0;
  evaluate(make_site(x), make_site(y),
           {Series::Half, false, AxialVariable::X3, propagating_only}, &n);
  return n;
}

}  // namespace wgimg
