#include "wgimg/volume_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace wgimg {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out.precision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << what;
  throw Error(ErrorKind::ParseError, os.str());
}

// Sorted distinct coordinates along one axis, merged within a relative tolerance.
std::vector<double> axis_values(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || std::abs(x - out.back()) > 1e-9 * std::max(1.0, std::abs(x))) {
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace

void write_volume_csv(const std::filesystem::path& path, const ImageVolume& vol) {
  auto out = open_out(path);
  out << "x1,x2,x3,value\n";
  for (std::size_t i = 0; i < vol.value.size(); ++i) {
    const Point3 p = vol.point(i);
    out << p.x1 << ',' << p.x2 << ',' << p.x3 << ',' << vol.value[i] << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed on " + path.string());
}

void write_volume_vtk(const std::filesystem::path& path, const ImageVolume& vol) {
  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\n"
      << "wgimg normalized I^2\n"
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << vol.dims[0] << ' ' << vol.dims[1] << ' ' << vol.dims[2] << '\n'
      << "ORIGIN " << vol.origin.x1 << ' ' << vol.origin.x2 << ' ' << vol.origin.x3 << '\n'
      << "SPACING " << vol.spacing[0] << ' ' << vol.spacing[1] << ' ' << vol.spacing[2]
      << '\n'
      << "POINT_DATA " << vol.value.size() << '\n'
      << "SCALARS I2 double 1\n"
      << "LOOKUP_TABLE default\n";
  for (double v : vol.value) out << v << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed on " + path.string());
}

ImageVolume read_volume_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line.rfind("x1,x2,x3,value", 0) != 0) {
    parse_fail(path, 1, "expected header x1,x2,x3,value");
  }
  std::vector<std::array<double, 4>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, 4> row{};
    std::istringstream ls(line);
    for (int c = 0; c < 4; ++c) {
      std::string cell;
      if (!std::getline(ls, cell, ',')) parse_fail(path, lineno, "expected 4 columns");
      try {
        std::size_t used = 0;
        row[static_cast<std::size_t>(c)] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        parse_fail(path, lineno, "bad number '" + cell + "'");
      }
    }
    rows.push_back(row);
  }
  if (rows.empty()) parse_fail(path, lineno, "no data rows");

  std::array<std::vector<double>, 3> axes;
  for (int d = 0; d < 3; ++d) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[static_cast<std::size_t>(d)]);
    axes[static_cast<std::size_t>(d)] = axis_values(std::move(v));
  }
  ImageVolume vol;
  vol.origin = {axes[0][0], axes[1][0], axes[2][0]};
  for (std::size_t d = 0; d < 3; ++d) {
    vol.dims[d] = static_cast<int>(axes[d].size());
    vol.spacing[d] = axes[d].size() > 1 ? axes[d][1] - axes[d][0] : 0.0;
  }
  const std::size_t n = static_cast<std::size_t>(vol.dims[0]) * vol.dims[1] * vol.dims[2];
  if (n != rows.size()) parse_fail(path, lineno, "rows do not form a full lattice");
  vol.value.assign(n, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // Rows are written in linear-index order; verify rather than re-sort.
    const Point3 p = vol.point(i);
    const auto& r = rows[i];
    const double tol = 1e-9 * std::max({1.0, std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
    if (std::abs(p.x1 - r[0]) > tol || std::abs(p.x2 - r[1]) > tol ||
        std::abs(p.x3 - r[2]) > tol) {
      parse_fail(path, i + 2, "row is out of lattice order");
    }
    vol.value[i] = r[3];
  }
  return vol;
}

ImageVolume read_volume_vtk(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) parse_fail(path, lineno + 1, std::string("missing ") + what);
    ++lineno;
  };
  next("version line");
  if (line.rfind("# vtk DataFile", 0) != 0) parse_fail(path, lineno, "not a legacy VTK file");
  next("title");
  next("format");
  if (line != "ASCII") parse_fail(path, lineno, "only ASCII files are supported");

  ImageVolume vol;
  std::size_t count = 0;
  bool have_dims = false;
  bool in_scalars = false;
  while (!in_scalars) {
    next("header");
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    if (key == "DATASET") {
      std::string kind;
      ls >> kind;
      if (kind != "STRUCTURED_POINTS") parse_fail(path, lineno, "expected STRUCTURED_POINTS");
    } else if (key == "DIMENSIONS") {
      ls >> vol.dims[0] >> vol.dims[1] >> vol.dims[2];
      have_dims = static_cast<bool>(ls);
    } else if (key == "ORIGIN") {
      ls >> vol.origin.x1 >> vol.origin.x2 >> vol.origin.x3;
    } else if (key == "SPACING" || key == "ASPECT_RATIO") {
      ls >> vol.spacing[0] >> vol.spacing[1] >> vol.spacing[2];
    } else if (key == "POINT_DATA") {
      ls >> count;
    } else if (key == "SCALARS") {
      next("LOOKUP_TABLE");
      if (line.rfind("LOOKUP_TABLE", 0) != 0) parse_fail(path, lineno, "expected LOOKUP_TABLE");
      in_scalars = true;
    } else {
      parse_fail(path, lineno, "unexpected keyword " + key);
    }
    if (!ls) parse_fail(path, lineno, "malformed " + key + " line");
  }
  if (!have_dims) parse_fail(path, lineno, "missing DIMENSIONS");
  const std::size_t n = static_cast<std::size_t>(vol.dims[0]) * vol.dims[1] * vol.dims[2];
  if (count != n) parse_fail(path, lineno, "POINT_DATA does not match DIMENSIONS");
  vol.value.reserve(n);
  double v = 0.0;
  while (vol.value.size() < n && in >> v) vol.value.push_back(v);
  if (vol.value.size() != n) parse_fail(path, lineno, "too few scalar values");
  return vol;
}

ImageVolume read_volume(const std::filesystem::path& path) {
  const auto ext = path.extension();
  if (ext == ".csv") return read_volume_csv(path);
  if (ext == ".vtk") return read_volume_vtk(path);
  throw Error(ErrorKind::IoError, path.string() + ": unknown volume extension");
}

void write_volume(const std::filesystem::path& path, const ImageVolume& vol) {
  const auto ext = path.extension();
  if (ext == ".csv") return write_volume_csv(path, vol);
  if (ext == ".vtk") return write_volume_vtk(path, vol);
  throw Error(ErrorKind::IoError, path.string() + ": unknown volume extension");
}

}  // namespace wgimg
