#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "wgimg/io.hpp"
#include "wgimg/volume_io.hpp"

using namespace wgimg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wgimg_test_io";
  fs::create_directories(dir);
  return dir / name;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::ValidationError;
}

Eigen::MatrixXcd random_matrix(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
  }
  return m;
}

void truncate(const fs::path& p, std::uintmax_t drop) {
  fs::resize_file(p, fs::file_size(p) - drop);
}

void overwrite_first_byte(const fs::path& p, char c) {
  std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(0);
  f.put(c);
}

ImageVolume sample_volume_for_io() {
  ImageVolume v;
  v.origin = {0.25, 1.5, -7.0};
  v.spacing = {0.5, 0.5, 0.5};
  v.dims = {4, 3, 2};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 24; ++i) v.raw.push_back(u(rng));
  v.normalize();
  return v;
}

}  // namespace

TEST(BinaryIo, PointSourceDataRoundTripIsBitExact) {
  const MeasurementGrid grid(WaveguideSpec{10.0, 8.0}, -9.5, 3, 2);
  const PointSourceData d(grid, 2.5, random_matrix(18, 1));
  const fs::path p = scratch("data.wgus");
  write_point_source_data(p, d);
  const PointSourceData back = read_point_source_data(p);
  EXPECT_TRUE(back.matrix() == d.matrix());
  EXPECT_EQ(back.n1(), 3);
  EXPECT_EQ(back.n2(), 2);
  EXPECT_EQ(back.r(), -9.5);
  EXPECT_EQ(back.a(), 10.0);
  EXPECT_EQ(back.b(), 8.0);
  EXPECT_EQ(back.k(), 2.5);
  EXPECT_EQ(fs::file_size(p), 4u + 3 * 4 + 4 * 8 + 18u * 18 * 16);
}

TEST(BinaryIo, DataMatrixRoundTripIsBitExact) {
  DataMatrixU U;
  U.M = 5;
  U.N = 2;
  U.values = random_matrix(7, 2);
  U.scene_id = "two-balls";
  U.n1 = 24;
  U.n2 = 22;
  U.r = -10;
  U.a = 10;
  U.b = 9;
  U.k = 3;
  U.noise_level = 0.05;
  U.seed = 0xfedcba9876543210ull;
  const fs::path p = scratch("U.wgum");
  write_data_matrix(p, U);
  const DataMatrixU back = read_data_matrix(p);
  EXPECT_TRUE(back.values == U.values);
  EXPECT_EQ(back.M, 5u);
  EXPECT_EQ(back.N, 2u);
  EXPECT_EQ(back.scene_id, "two-balls");
  EXPECT_EQ(back.n1, 24);
  EXPECT_EQ(back.n2, 22);
  EXPECT_EQ(back.r, -10.0);
  EXPECT_EQ(back.b, 9.0);
  EXPECT_EQ(back.noise_level, 0.05);
  EXPECT_EQ(back.seed, U.seed);
}

TEST(BinaryIo, CorruptFilesAreRejected) {
  DataMatrixU U;
  U.M = 2;
  U.values = random_matrix(2, 4);
  const fs::path p = scratch("bad.wgum");
  write_data_matrix(p, U);
  truncate(p, 3);
  EXPECT_EQ(kind_of([&] { read_data_matrix(p); }), ErrorKind::IoError);

  write_data_matrix(p, U);
  overwrite_first_byte(p, 'X');
  EXPECT_EQ(kind_of([&] { read_data_matrix(p); }), ErrorKind::IoError);

  write_data_matrix(p, U);
  { std::ofstream(p, std::ios::app | std::ios::binary) << 'z'; }
  EXPECT_EQ(kind_of([&] { read_data_matrix(p); }), ErrorKind::IoError);

  // A WGUM file is not a WGUS file.
  write_data_matrix(p, U);
  EXPECT_EQ(kind_of([&] { read_point_source_data(p); }), ErrorKind::IoError);
  EXPECT_EQ(kind_of([] { read_point_source_data(scratch("missing.wgus")); }), ErrorKind::IoError);
}

TEST(SceneJson, RoundTrip) {
  const Scene s({{{1.5, 2.5, -3.5}, 0.125, {2.0, 2.0}}, {{7.0, 1.0, -2.0}, 0.5, {1.25, 0.0}}});
  const fs::path p = scratch("scene.json");
  write_scene_json(p, s, "pair");
  std::string id;
  const Scene back = read_scene_json(p, &id);
  EXPECT_EQ(id, "pair");
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.voxels()[i].center, s.voxels()[i].center);
    EXPECT_EQ(back.voxels()[i].volume, s.voxels()[i].volume);
    EXPECT_EQ(back.voxels()[i].epsilon, s.voxels()[i].epsilon);
  }
  { std::ofstream(p) << "{\"voxels\": [1, 2"; }
  EXPECT_EQ(kind_of([&] { read_scene_json(p); }), ErrorKind::ParseError);
}

TEST(VolumeIo, CsvAndVtkRoundTrip) {
  const ImageVolume v = sample_volume_for_io();
  for (const char* name : {"vol.csv", "vol.vtk"}) {
    const fs::path p = scratch(name);
    write_volume(p, v);
    const ImageVolume back = read_volume(p);
    EXPECT_EQ(back.dims, v.dims) << name;
    EXPECT_EQ(back.origin, v.origin) << name;
    EXPECT_EQ(back.spacing, v.spacing) << name;
    ASSERT_EQ(back.value.size(), v.value.size()) << name;
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back.value[i], v.value[i]) << name;
    EXPECT_TRUE(back.raw.empty());
  }
}

TEST(VolumeIo, LayoutOfWrittenFiles) {
  const ImageVolume v = sample_volume_for_io();
  write_volume_csv(scratch("layout.csv"), v);
  std::ifstream csv(scratch("layout.csv"));
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  EXPECT_EQ(header, "x1,x2,x3,value");
  EXPECT_EQ(first.rfind("0.25,1.5,-7,", 0), 0u) << first;

  write_volume_vtk(scratch("layout.vtk"), v);
  std::ifstream vtk(scratch("layout.vtk"));
  std::string text((std::istreambuf_iterator<char>(vtk)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(text.find("DATASET STRUCTURED_POINTS"), std::string::npos);
  EXPECT_NE(text.find("DIMENSIONS 4 3 2"), std::string::npos);
  EXPECT_NE(text.find("POINT_DATA 24"), std::string::npos);
  EXPECT_NE(text.find("SCALARS I2 double 1"), std::string::npos);
}

TEST(VolumeIo, BadInputs) {
  EXPECT_EQ(kind_of([] { read_volume(scratch("vol.txt")); }), ErrorKind::IoError);
  const fs::path p = scratch("short.csv");
  { std::ofstream(p) << "x1,x2,x3,value\n0,0,-1,1\n1,0,-1,0.5\n0,0,-1,0.2\n"; }
  EXPECT_EQ(kind_of([&] { read_volume_csv(p); }), ErrorKind::ParseError);
}
