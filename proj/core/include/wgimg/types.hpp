#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace wgimg {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using RMat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// A point in the waveguide frame. x3 is the axial coordinate; the guide
/// occupies x3 < 0 with the conducting end plate at x3 = 0.
struct Point3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Reflection through the end plate: (x1, x2, x3) -> (x1, x2, -x3).
constexpr Point3 mirror_point(const Point3& p) { return {p.x1, p.x2, -p.x3}; }

inline Vec3 to_vec(const Point3& p) { return {p.x1, p.x2, p.x3}; }

enum class ErrorKind {
  CutoffResonance,
  InvalidGeometry,
  FamilyMismatch,
  CoincidentAxialPlanes,
  PointOutsideHalfGuide,
  SeparationViolated,
  LSDiverged,
  DimensionMismatch,
  EmptyLattice,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wgimg
