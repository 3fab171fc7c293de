#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "wgimg/imaging.hpp"

namespace wgimg {

struct BoxShape {
  Vec3 lo;
  Vec3 hi;
  bool contains(const Vec3& p) const;
};

struct BallShape {
  Vec3 center;
  double radius = 0.0;
  bool contains(const Vec3& p) const;
};

/// Circular cylinder with its axis along x3.
struct CylinderShape {
  double c1 = 0.0;
  double c2 = 0.0;
  double radius = 0.0;
  double x3_lo = 0.0;
  double x3_hi = 0.0;
  bool contains(const Vec3& p) const;
};

/// Union of boxes (an L is two of them).
struct LShape {
  std::vector<BoxShape> boxes;
  bool contains(const Vec3& p) const;
};

struct Shape {
  std::variant<BoxShape, BallShape, CylinderShape, LShape> geometry;
  cplx epsilon{1.0, 0.0};

  bool contains(const Vec3& p) const;
  /// Axis-aligned bounding box.
  std::pair<Vec3, Vec3> bounds() const;
};

/// Voxels of pitch p centered at ((i+1/2)p, (j+1/2)p, -(l+1/2)p) whose center
/// lies in some shape (closed sets). A voxel takes the permittivity of the
/// first shape containing it. Output is ordered by (l, j, i).
std::vector<Voxel> voxelize(const WaveguideSpec& spec, const std::vector<Shape>& shapes,
                            double pitch);

struct RunConfig {
  std::filesystem::path source;
  WaveguideSpec spec{10.0, 10.0};
  double k = 3.0;
  double r = -10.0;
  int n1 = 24;
  int n2 = 24;
  std::string scene_id = "scene";
  double pitch = 0.25;
  std::vector<Shape> shapes;
  Scene scene;
  ForwardModel model;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  LatticeSpec lattice;
  std::filesystem::path output = "out";

  double wavelength() const;
  /// Smallest axial distance at which the Green function is evaluated: voxel
  /// to measurement plane, and for LS also between distinct voxel planes.
  double axial_gap() const;
  MeasurementGrid grid() const;
  ModeBasis basis() const;
  GreenEvaluator green() const;
};

/// Validation failure tied to a JSON field path such as `scene.shapes[1].radius`.
/// `cause` is the kind of the underlying check (ValidationError when the
/// config itself is malformed).
class ConfigError : public Error {
 public:
  ConfigError(std::string field, ErrorKind cause, const std::string& what)
      : Error(ErrorKind::ValidationError, field + ": " + what),
        field_(std::move(field)),
        cause_(cause) {}

  const std::string& field() const noexcept { return field_; }
  ErrorKind cause() const noexcept { return cause_; }

 private:
  std::string field_;
  ErrorKind cause_;
};

/// Parses and validates a JSON run configuration. Throws Error(ParseError)
/// with line and column for malformed JSON, ConfigError otherwise.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& source = {});

}  // namespace wgimg
