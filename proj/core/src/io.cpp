#include "wgimg/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace wgimg {

namespace {

constexpr std::uint32_t kVersion = 1;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  }

  void magic(const char* m) { out_.write(m, 4); }
  template <class T>
  void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put(const cplx& c) {
    put(c.real());
    put(c.imag());
  }
  void bytes(const std::string& s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }
  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorKind::IoError, "write failed on " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  }

  void expect_magic(const char* m) {
    char got[4];
    raw(got, 4);
    if (std::memcmp(got, m, 4) != 0) {
      throw Error(ErrorKind::IoError, path_.string() + ": not a " + std::string(m, 4) + " file");
    }
    const auto version = get<std::uint32_t>();
    if (version != kVersion) {
      throw Error(ErrorKind::IoError,
                  path_.string() + ": unsupported version " + std::to_string(version));
    }
  }
  template <class T>
  T get() {
    T v;
    raw(reinterpret_cast<char*>(&v), sizeof(T));
    return to_little(v);
  }
  cplx get_complex() {
    const double re = get<double>();
    const double im = get<double>();
    return {re, im};
  }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw Error(ErrorKind::IoError, path_.string() + ": trailing bytes");
    }
  }

 private:
  void raw(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(ErrorKind::IoError, path_.string() + ": unexpected end of file");
    }
  }

  std::filesystem::path path_;
  std::ifstream in_;
};

std::uint32_t checked_u32(std::size_t v) {
  if (v > 0xffffffffu) throw Error(ErrorKind::IoError, "dimension too large for format");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_point_source_data(const std::filesystem::path& path, const PointSourceData& data) {
  Writer w(path);
  w.magic("WGUS");
  w.put(kVersion);
  w.put(checked_u32(static_cast<std::size_t>(data.n1())));
  w.put(checked_u32(static_cast<std::size_t>(data.n2())));
  for (double v : {data.r(), data.a(), data.b(), data.k()}) w.put(v);
  const std::size_t n = data.nodes();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const CMat3 blk = data.block(x, y);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) w.put(blk(i, j));
      }
    }
  }
  w.finish();
}

PointSourceData read_point_source_data(const std::filesystem::path& path) {
  Reader rd(path);
  rd.expect_magic("WGUS");
  const auto n1 = static_cast<int>(rd.get<std::uint32_t>());
  const auto n2 = static_cast<int>(rd.get<std::uint32_t>());
  const double r = rd.get<double>();
  const double a = rd.get<double>();
  const double b = rd.get<double>();
  const double k = rd.get<double>();
  const MeasurementGrid grid(WaveguideSpec{a, b}, r, n1, n2);
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd values(3 * n, 3 * n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) values(3 * x + i, 3 * y + j) = rd.get_complex();
      }
    }
  }
  rd.expect_end();
  return PointSourceData(grid, k, std::move(values));
}

void write_data_matrix(const std::filesystem::path& path, const DataMatrixU& U) {
  const auto dim = static_cast<Eigen::Index>(U.dim());
  if (U.values.rows() != dim || U.values.cols() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "data matrix shape does not match M+N");
  }
  Writer w(path);
  w.magic("WGUM");
  w.put(kVersion);
  w.put(checked_u32(U.M));
  w.put(checked_u32(U.N));
  w.put(checked_u32(static_cast<std::size_t>(U.n1)));
  w.put(checked_u32(static_cast<std::size_t>(U.n2)));
  for (double v : {U.r, U.a, U.b, U.k, U.noise_level}) w.put(v);
  w.put(U.seed);
  w.put(checked_u32(U.scene_id.size()));
  w.bytes(U.scene_id);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) w.put(U.values(i, j));
  }
  w.finish();
}

DataMatrixU read_data_matrix(const std::filesystem::path& path) {
  Reader rd(path);
  rd.expect_magic("WGUM");
  DataMatrixU U;
  U.M = rd.get<std::uint32_t>();
  U.N = rd.get<std::uint32_t>();
  U.n1 = static_cast<int>(rd.get<std::uint32_t>());
  U.n2 = static_cast<int>(rd.get<std::uint32_t>());
  U.r = rd.get<double>();
  U.a = rd.get<double>();
  U.b = rd.get<double>();
  U.k = rd.get<double>();
  U.noise_level = rd.get<double>();
  U.seed = rd.get<std::uint64_t>();
  U.scene_id = rd.bytes(rd.get<std::uint32_t>());
  const auto dim = static_cast<Eigen::Index>(U.dim());
  U.values.resize(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) U.values(i, j) = rd.get_complex();
  }
  rd.expect_end();
  return U;
}

void write_scene_json(const std::filesystem::path& path, const Scene& scene,
                      const std::string& scene_id) {
  nlohmann::json j;
  j["id"] = scene_id;
  auto& arr = j["voxels"] = nlohmann::json::array();
  for (const Voxel& v : scene.voxels()) {
    arr.push_back({{"center", {v.center.x1, v.center.x2, v.center.x3}},
                   {"volume", v.volume},
                   {"epsilon", {v.epsilon.real(), v.epsilon.imag()}}});
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << j.dump(1) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed on " + path.string());
}

Scene read_scene_json(const std::filesystem::path& path, std::string* scene_id) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    if (scene_id) *scene_id = j.value("id", std::string());
    std::vector<Voxel> voxels;
    for (const auto& v : j.at("voxels")) {
      const auto& c = v.at("center");
      const auto& e = v.at("epsilon");
      voxels.push_back({{c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()},
                        v.at("volume").get<double>(),
                        {e.at(0).get<double>(), e.at(1).get<double>()}});
    }
    return Scene(std::move(voxels));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + ex.what());
  }
}

}  // namespace wgimg
