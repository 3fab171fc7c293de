#include "wgimg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wgimg {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what,
                          ErrorKind cause = ErrorKind::ValidationError) {
  throw ConfigError(field, cause, what);
}

// Typed access with the field path carried along for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }
  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Node at(const char* key) const {
    if (!j_.is_object()) invalid(path_, "expected an object");
    if (!j_.contains(key)) invalid(join(key), "missing required field");
    return {j_.at(key), join(key)};
  }
  Node at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  std::size_t size() const {
    if (!j_.is_array()) invalid(path_, "expected an array");
    return j_.size();
  }

  double number() const {
    if (!j_.is_number()) invalid(path_, "expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) invalid(path_, "expected a finite number");
    return v;
  }
  double number(const char* key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
  }

  int integer() const {
    if (!j_.is_number_integer()) invalid(path_, "expected an integer");
    return j_.get<int>();
  }
  int integer(const char* key, int fallback) const {
    return has(key) ? at(key).integer() : fallback;
  }

  std::uint64_t unsigned64() const {
    if (!j_.is_number_unsigned()) invalid(path_, "expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!j_.is_string()) invalid(path_, "expected a string");
    return j_.get<std::string>();
  }
  std::string string(const char* key, const std::string& fallback) const {
    return has(key) ? at(key).string() : fallback;
  }

  template <std::size_t N>
  std::array<double, N> numbers() const {
    if (!j_.is_array() || j_.size() != N) {
      invalid(path_, "expected an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = at(i).number();
    return out;
  }

  Vec3 vec3() const {
    const auto a = numbers<3>();
    return {a[0], a[1], a[2]};
  }

  /// Either a number or [re, im].
  cplx complex() const {
    if (j_.is_number()) return {number(), 0.0};
    const auto a = numbers<2>();
    return {a[0], a[1]};
  }

 private:
  std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

double positive(const Node& n) {
  const double v = n.number();
  if (!(v > 0.0)) invalid(n.path(), "must be positive");
  return v;
}

BoxShape parse_box(const Node& n) {
  BoxShape b{n.at("min").vec3(), n.at("max").vec3()};
  if (!(b.lo.array() < b.hi.array()).all()) invalid(n.path(), "box needs min < max");
  return b;
}

Shape parse_shape(const Node& n) {
  Shape s;
  const std::string type = n.at("type").string();
  if (type == "box") {
    s.geometry = parse_box(n);
  } else if (type == "ball") {
    s.geometry = BallShape{n.at("center").vec3(), positive(n.at("radius"))};
  } else if (type == "cylinder") {
    const auto c = n.at("center").numbers<2>();
    const auto x3 = n.at("x3").numbers<2>();
    if (!(x3[0] < x3[1])) invalid(n.at("x3").path(), "expected [lo, hi] with lo < hi");
    s.geometry = CylinderShape{c[0], c[1], positive(n.at("radius")), x3[0], x3[1]};
  } else if (type == "lshape") {
    const Node boxes = n.at("boxes");
    LShape l;
    for (std::size_t i = 0; i < boxes.size(); ++i) l.boxes.push_back(parse_box(boxes.at(i)));
    if (l.boxes.empty()) invalid(boxes.path(), "needs at least one box");
    s.geometry = std::move(l);
  } else {
    invalid(n.at("type").path(), "unknown shape '" + type + "' (box, ball, cylinder, lshape)");
  }
  s.epsilon = n.at("epsilon").complex();
  if (!(s.epsilon.real() > 0.0) || !(s.epsilon.imag() >= 0.0)) {
    invalid(n.at("epsilon").path(), "permittivity needs Re > 0 and Im >= 0");
  }
  return s;
}

std::array<double, 2> parse_range(const Node& n) {
  const auto r = n.numbers<2>();
  if (!(r[0] <= r[1])) invalid(n.path(), "expected [lo, hi] with lo <= hi");
  return r;
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  // nlohmann reports the position one past the offending character.
  if (col > 1) --col;
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

bool BoxShape::contains(const Vec3& p) const {
  return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

bool BallShape::contains(const Vec3& p) const {
  return (p - center).squaredNorm() <= radius * radius;
}

bool CylinderShape::contains(const Vec3& p) const {
  const double d1 = p[0] - c1;
  const double d2 = p[1] - c2;
  return d1 * d1 + d2 * d2 <= radius * radius && p[2] >= x3_lo && p[2] <= x3_hi;
}

bool LShape::contains(const Vec3& p) const {
  return std::any_of(boxes.begin(), boxes.end(), [&](const BoxShape& b) { return b.contains(p); });
}

bool Shape::contains(const Vec3& p) const {
  return std::visit([&](const auto& g) { return g.contains(p); }, geometry);
}

std::pair<Vec3, Vec3> Shape::bounds() const {
  struct Visitor {
    std::pair<Vec3, Vec3> operator()(const BoxShape& b) const { return {b.lo, b.hi}; }
    std::pair<Vec3, Vec3> operator()(const BallShape& b) const {
      const Vec3 r = Vec3::Constant(b.radius);
      return {b.center - r, b.center + r};
    }
    std::pair<Vec3, Vec3> operator()(const CylinderShape& c) const {
      return {{c.c1 - c.radius, c.c2 - c.radius, c.x3_lo},
              {c.c1 + c.radius, c.c2 + c.radius, c.x3_hi}};
    }
    std::pair<Vec3, Vec3> operator()(const LShape& l) const {
      Vec3 lo = l.boxes.front().lo;
      Vec3 hi = l.boxes.front().hi;
      for (const BoxShape& b : l.boxes) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
      }
      return {lo, hi};
    }
  };
  return std::visit(Visitor{}, geometry);
}

std::vector<Voxel> voxelize(const WaveguideSpec& spec, const std::vector<Shape>& shapes,
                            double pitch) {
  if (!(pitch > 0.0)) throw Error(ErrorKind::InvalidGeometry, "voxel pitch must be positive");
  std::vector<Voxel> out;
  if (shapes.empty()) return out;
  Vec3 lo = shapes.front().bounds().first;
  Vec3 hi = shapes.front().bounds().second;
  for (const Shape& s : shapes) {
    const auto [l, h] = s.bounds();
    lo = lo.cwiseMin(l);
    hi = hi.cwiseMax(h);
  }
  const int n1 = static_cast<int>(std::floor(spec.a / pitch + 1e-9));
  const int n2 = static_cast<int>(std::floor(spec.b / pitch + 1e-9));
  auto first = [&](double v) { return std::max(0, static_cast<int>(std::floor(v / pitch - 0.5))); };
  auto last = [&](double v, int n) {
    return std::min(n - 1, static_cast<int>(std::ceil(v / pitch - 0.5)));
  };
  // Axial index l has center -(l + 1/2) pitch, so it grows as x3 decreases.
  const int l_lo = std::max(0, static_cast<int>(std::floor(-hi[2] / pitch - 0.5)));
  const int l_hi = static_cast<int>(std::ceil(-lo[2] / pitch - 0.5));
  const double vol = pitch * pitch * pitch;
  for (int l = l_lo; l <= l_hi; ++l) {
    for (int j = first(lo[1]); j <= last(hi[1], n2); ++j) {
      for (int i = first(lo[0]); i <= last(hi[0], n1); ++i) {
        const Vec3 c{(i + 0.5) * pitch, (j + 0.5) * pitch, -(l + 0.5) * pitch};
        for (const Shape& s : shapes) {
          if (s.contains(c)) {
            out.push_back({{c[0], c[1], c[2]}, vol, s.epsilon});
            break;
          }
        }
      }
    }
  }
  return out;
}

double RunConfig::wavelength() const { return 2.0 * kPi / k; }

double RunConfig::axial_gap() const {
  double gap = scene.empty() ? -r : scene.min_x3() - r;
  if (model.kind == ForwardModel::Kind::LS) {
    const double inter = scene.min_interplane_gap();
    if (inter > 0.0) gap = std::min(gap, inter);
  }
  return gap;
}

MeasurementGrid RunConfig::grid() const { return MeasurementGrid(spec, r, n1, n2); }

ModeBasis RunConfig::basis() const {
  return enumerate_modes(spec, k, EvanescentPolicy::decay(axial_gap()));
}

GreenEvaluator RunConfig::green() const { return GreenEvaluator(basis(), axial_gap()); }

RunConfig parse_config(const std::string& text, const std::filesystem::path& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    std::string msg = ex.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw Error(ErrorKind::ParseError,
                source.string() + ": " + location(text, ex.byte) + ": " + msg);
  }
  const Node root(doc, "");
  if (!doc.is_object()) invalid("(root)", "expected a JSON object");

  RunConfig cfg;
  cfg.source = source;

  const Node wg = root.at("waveguide");
  cfg.spec = {positive(wg.at("a")), positive(wg.at("b"))};
  cfg.k = positive(root.at("k"));
  try {
    enumerate_modes(cfg.spec, cfg.k, EvanescentPolicy::propagating_only());
  } catch (const Error& e) {
    invalid("k", std::string(to_string(e.kind())) + ": " + e.what(), e.kind());
  }

  const Node meas = root.at("measurement");
  cfg.r = meas.at("r").number();
  if (!(cfg.r < 0.0)) invalid(meas.at("r").path(), "measurement plane must satisfy r < 0");
  cfg.n1 = meas.integer("n1", cfg.n1);
  cfg.n2 = meas.integer("n2", cfg.n2);
  if (cfg.n1 < 1 || cfg.n2 < 1) invalid(meas.path(), "n1 and n2 must be >= 1");

  if (root.has("scene")) {
    const Node sc = root.at("scene");
    cfg.scene_id = sc.string("id", cfg.scene_id);
    if (sc.has("pitch")) cfg.pitch = positive(sc.at("pitch"));
    if (sc.has("shapes")) {
      const Node shapes = sc.at("shapes");
      for (std::size_t i = 0; i < shapes.size(); ++i) {
        cfg.shapes.push_back(parse_shape(shapes.at(i)));
      }
    }
    cfg.scene = Scene(voxelize(cfg.spec, cfg.shapes, cfg.pitch));
    if (!cfg.shapes.empty() && cfg.scene.empty()) {
      invalid(sc.at("shapes").path(), "shapes contain no voxel centers at pitch " +
                                   std::to_string(cfg.pitch));
    }
    try {
      cfg.scene.validate(cfg.spec, cfg.r, cfg.wavelength());
    } catch (const Error& e) {
      invalid(sc.path(), std::string(to_string(e.kind())) + ": " + e.what(), e.kind());
    }
  }

  if (root.has("model")) {
    const Node m = root.at("model");
    const std::string type = m.string("type", "born");
    if (type == "born") {
      cfg.model = ForwardModel::born();
    } else if (type == "ls") {
      cfg.model = ForwardModel::ls();
    } else {
      invalid(m.at("type").path(), "expected 'born' or 'ls'");
    }
    if (m.has("tol")) cfg.model.tol = positive(m.at("tol"));
    cfg.model.max_iter = m.integer("max_iter", cfg.model.max_iter);
    if (cfg.model.max_iter < 1) invalid(m.at("max_iter").path(), "must be >= 1");
  }

  if (root.has("noise")) {
    const Node nz = root.at("noise");
    cfg.noise_level = nz.number("level", 0.0);
    if (!(cfg.noise_level >= 0.0)) invalid(nz.at("level").path(), "must be non-negative");
    if (nz.has("seed")) cfg.seed = nz.at("seed").unsigned64();
  }

  const Node img = root.at("imaging");
  cfg.lattice.spacing = img.has("spacing") ? positive(img.at("spacing")) : cfg.lattice.spacing;
  const double s = cfg.lattice.spacing;
  cfg.lattice.x1 = img.has("x1") ? parse_range(img.at("x1")) : std::array{s, cfg.spec.a - s};
  cfg.lattice.x2 = img.has("x2") ? parse_range(img.at("x2")) : std::array{s, cfg.spec.b - s};
  cfg.lattice.x3 = parse_range(img.at("x3"));
  if (cfg.lattice.x1[0] < 0.0 || cfg.lattice.x1[1] > cfg.spec.a || cfg.lattice.x2[0] < 0.0 ||
      cfg.lattice.x2[1] > cfg.spec.b) {
    invalid(img.path(), "imaging lattice leaves the cross-section");
  }
  if (!(cfg.lattice.x3[1] < 0.0) || !(cfg.lattice.x3[0] > cfg.r)) {
    invalid(img.at("x3").path(), "imaging range must lie strictly between r and 0");
  }

  if (root.has("output")) cfg.output = root.at("output").string();

  // Mode projection needs enough nodes for the largest propagating index.
  const ModeBasis prop = enumerate_modes(cfg.spec, cfg.k, EvanescentPolicy::propagating_only());
  const MeasurementGrid grid = cfg.grid();
  if (!grid.nyquist_ok(prop)) {
    invalid(meas.path(),
            "grid " + std::to_string(cfg.n1) + "x" + std::to_string(cfg.n2) +
                " is too coarse, need at least " +
                std::to_string(2 * prop.max_propagating_index() + 2) + " nodes per direction",
            ErrorKind::DimensionMismatch);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace wgimg
