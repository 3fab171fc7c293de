#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wgimg/config.hpp"
#include "wgimg/io.hpp"
#include "wgimg/parallel.hpp"
#include "wgimg/volume_io.hpp"

using namespace wgimg;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  const fs::path d = fs::temp_directory_path() / "wgimg_test_cli";
  fs::create_directories(d);
  return d;
}

CliRun run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string("\"") + WGIMG_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  CliRun r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string config(const char* name) { return std::string(WGIMG_CONFIG_DIR "/") + name; }

std::string common(const char* cfg, const fs::path& out) {
  return "--config \"" + config(cfg) + "\" --output \"" + out.string() + "\"";
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST(Cli, ModesPrintsTableAndCounts) {
  const CliRun r = run_cli("modes " + common("two_balls.json", work_dir() / "modes"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("M=82 N=64 total propagating=146"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("TE"), std::string::npos);
  EXPECT_NE(r.out.find("TM"), std::string::npos);
}

TEST(Cli, SynthesizeWritesTheInMemoryMatrix) {
  const fs::path out = work_dir() / "synth";
  fs::remove_all(out);
  const CliRun r = run_cli("synthesize --threads 1 " + common("single_voxel.json", out));
  ASSERT_EQ(r.status, 0) << r.err;
  for (const char* f : {"data.wgus", "U.wgum", "scene.json"}) EXPECT_TRUE(fs::exists(out / f)) << f;

  set_thread_count(1);
  const RunConfig cfg = load_config(config("single_voxel.json"));
  const GreenEvaluator green = cfg.green();
  const MeasurementGrid grid = cfg.grid();
  const PointSourceData data = synthesize_data(green, cfg.scene, grid, cfg.model);
  const DataMatrixU U = assemble_U(green.basis(), data, grid);
  set_thread_count(0);

  EXPECT_TRUE(read_point_source_data(out / "data.wgus").matrix() == data.matrix());
  const DataMatrixU disk = read_data_matrix(out / "U.wgum");
  EXPECT_TRUE(disk.values == U.values);
  EXPECT_EQ(disk.scene_id, "single-voxel");
  std::string id;
  EXPECT_EQ(read_scene_json(out / "scene.json", &id).size(), cfg.scene.size());
  EXPECT_EQ(id, "single-voxel");
}

TEST(Cli, ImageLocatesTheVoxelAndExportRoundTrips) {
  const fs::path out = work_dir() / "image";
  fs::remove_all(out);
  ASSERT_EQ(run_cli("synthesize " + common("single_voxel.json", out)).status, 0);
  const CliRun r = run_cli("image --seed 3 " + common("single_voxel.json", out));
  ASSERT_EQ(r.status, 0) << r.err;
  const ImageVolume vol = read_volume(out / "image.vtk");
  const Point3 p = vol.point(argmax(vol.value));
  EXPECT_LE(std::abs(p.x1 - 4.875), 0.25);
  EXPECT_LE(std::abs(p.x2 - 4.875), 0.25);
  EXPECT_LE(std::abs(p.x3 + 4.875), 0.25);

  const fs::path csv = out / "from_vtk.csv";
  ASSERT_EQ(run_cli("export --input \"" + (out / "image.vtk").string() + "\" --to \"" +
                  csv.string() + "\"")
                .status,
            0);
  EXPECT_EQ(slurp(csv), slurp(out / "image.csv"));

  // Same seed, same image.
  const std::string first = slurp(out / "image.csv");
  ASSERT_EQ(run_cli("image --seed 3 " + common("single_voxel.json", out)).status, 0);
  EXPECT_EQ(slurp(out / "image.csv"), first);
}

TEST(Cli, PsfPeaksAtTheRequestedPoint) {
  const fs::path out = work_dir() / "psf";
  const CliRun r = run_cli("psf --xstar 5,5,-5 " + common("single_voxel.json", out));
  ASSERT_EQ(r.status, 0) << r.err;
  const ImageVolume vol = read_volume(out / "psf.csv");
  const Point3 p = vol.point(argmax(vol.value));
  EXPECT_EQ(p, (Point3{5.0, 5.0, -5.0}));
}

TEST(Cli, VerifyPassesAndWritesReport) {
  const fs::path out = work_dir() / "verify";
  const CliRun r = run_cli("verify " + common("single_voxel.json", out));
  ASSERT_EQ(r.status, 0) << r.out << r.err;
  const auto report = nlohmann::json::parse(slurp(out / "verify.json"));
  ASSERT_EQ(report.size(), 4u);
  for (const auto& c : report) EXPECT_TRUE(c.at("passed").get<bool>()) << c.dump();
}

TEST(Cli, ErrorsAreJsonOnStderr) {
  const fs::path bad = work_dir() / "resonant.json";
  {
    std::string text = slurp(config("single_voxel.json"));
    text.replace(text.find("\"k\": 3.0"), 8, "\"k\": 0.3141592653589793");
    std::ofstream(bad) << text;
  }
  const CliRun r = run_cli("modes --config \"" + bad.string() + "\"");
  EXPECT_EQ(r.status, 1);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j.at("error").at("kind"), "ValidationError");
  EXPECT_EQ(j.at("error").at("field"), "k");

  const CliRun missing = run_cli("image --config /nonexistent/cfg.json");
  EXPECT_EQ(missing.status, 2);
  EXPECT_EQ(nlohmann::json::parse(missing.err).at("error").at("kind"), "UsageError");

  const fs::path junk = work_dir() / "junk.wgum";
  std::ofstream(junk) << "not a matrix";
  const CliRun corrupt = run_cli("image --input \"" + junk.string() + "\" " +
                                 common("single_voxel.json", work_dir() / "junk"));
  EXPECT_EQ(corrupt.status, 1);
  EXPECT_EQ(nlohmann::json::parse(corrupt.err).at("error").at("kind"), "IoError");

  const CliRun usage = run_cli("modes");
  EXPECT_EQ(usage.status, 2);
  EXPECT_EQ(nlohmann::json::parse(usage.err).at("error").at("kind"), "UsageError");
}
