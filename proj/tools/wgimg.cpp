// wgimg: synthesize waveguide scattering data and image it.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "verify.hpp"
#include "wgimg/config.hpp"
#include "wgimg/io.hpp"
#include "wgimg/parallel.hpp"
#include "wgimg/volume_io.hpp"

namespace fs = std::filesystem;
using namespace wgimg;

namespace {

struct Options {
  std::string config;
  std::string output;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string model;
  std::string xstar;
  std::string input;
  std::string to;
  bool evanescent = false;
};

RunConfig load(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (!o.output.empty()) cfg.output = o.output;
  if (o.seed) cfg.seed = *o.seed;
  if (o.model == "born") {
    cfg.model.kind = ForwardModel::Kind::Born;
  } else if (o.model == "ls") {
    cfg.model.kind = ForwardModel::Kind::LS;
  }
  fs::create_directories(cfg.output);
  return cfg;
}

Point3 parse_point(const std::string& s) {
  std::array<double, 3> v{};
  std::istringstream in(s);
  std::string part;
  int i = 0;
  while (std::getline(in, part, ',')) {
    if (i == 3) break;
    try {
      std::size_t used = 0;
      v[static_cast<std::size_t>(i)] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "--xstar: bad coordinate '" + part + "'");
    }
    ++i;
  }
  if (i != 3 || in.rdbuf()->in_avail() > 0) {
    throw Error(ErrorKind::ParseError, "--xstar expects three comma-separated numbers");
  }
  return {v[0], v[1], v[2]};
}

void print_mode(const ModeIndex& m) {
  std::printf("%6zu  %s  (%3d,%3d)  %12.8f  %12.8f%+12.8fi  %s\n", m.linear,
              m.family == Family::TE ? "TE" : "TM", m.p1, m.p2, m.cutoff, m.axial.real(),
              m.axial.imag(), m.propagating ? "yes" : "no");
}

int cmd_modes(const Options& o) {
  const RunConfig cfg = load(o);
  const ModeBasis basis = o.evanescent ? cfg.basis()
                                       : enumerate_modes(cfg.spec, cfg.k,
                                                         EvanescentPolicy::propagating_only());
  std::printf("# a=%g b=%g k=%g\n", cfg.spec.a, cfg.spec.b, cfg.k);
  std::printf("%6s  %s  %9s  %12s  %25s  %s\n", "index", "fam", "pair", "cutoff", "axial",
              "propagating");
  for (const ModeIndex& m : basis.te_modes()) print_mode(m);
  for (const ModeIndex& m : basis.tm_modes()) print_mode(m);
  std::printf("M=%zu N=%zu total propagating=%zu\n", basis.M(), basis.N(),
              basis.M() + basis.N());
  return 0;
}

int cmd_synthesize(const Options& o) {
  const RunConfig cfg = load(o);
  const ModeBasis basis = cfg.basis();
  const GreenEvaluator green(basis, cfg.axial_gap());
  const MeasurementGrid grid = cfg.grid();
  const PointSourceData data = synthesize_data(green, cfg.scene, grid, cfg.model);
  DataMatrixU U = assemble_U(basis, data, grid);
  U.scene_id = cfg.scene_id;

  write_point_source_data(cfg.output / "data.wgus", data);
  write_data_matrix(cfg.output / "U.wgum", U);
  write_scene_json(cfg.output / "scene.json", cfg.scene, cfg.scene_id);
  std::printf("voxels=%zu nodes=%zu M=%zu N=%zu\n", cfg.scene.size(), grid.size(), U.M, U.N);
  std::printf("wrote %s\n", (cfg.output / "U.wgum").string().c_str());
  return 0;
}

int cmd_image(const Options& o) {
  const RunConfig cfg = load(o);
  const fs::path in = o.input.empty() ? cfg.output / "U.wgum" : fs::path(o.input);
  DataMatrixU U = read_data_matrix(in);
  const ModeBasis basis =
      enumerate_modes(cfg.spec, cfg.k, EvanescentPolicy::propagating_only());
  if (U.k != cfg.k || U.a != cfg.spec.a || U.b != cfg.spec.b) {
    throw Error(ErrorKind::DimensionMismatch, in.string() + " was built for another geometry");
  }
  U = add_noise(U, cfg.noise_level, cfg.seed);
  const ImageVolume vol = image_volume(basis, U, cfg.lattice);
  write_volume_vtk(cfg.output / "image.vtk", vol);
  write_volume_csv(cfg.output / "image.csv", vol);
  const auto peak = std::max_element(vol.value.begin(), vol.value.end()) - vol.value.begin();
  const Point3 p = vol.point(static_cast<std::size_t>(peak));
  std::printf("noise=%g seed=%llu nodes=%zu max at (%g, %g, %g)\n", cfg.noise_level,
              static_cast<unsigned long long>(cfg.seed), vol.size(), p.x1, p.x2, p.x3);
  return 0;
}

int cmd_psf(const Options& o) {
  const RunConfig cfg = load(o);
  const Point3 xs = parse_point(o.xstar);
  const ModeBasis basis =
      enumerate_modes(cfg.spec, cfg.k, EvanescentPolicy::propagating_only());
  const ImageVolume vol = psf_volume(basis, xs, cfg.lattice);
  write_volume_vtk(cfg.output / "psf.vtk", vol);
  write_volume_csv(cfg.output / "psf.csv", vol);
  const auto peak = std::max_element(vol.value.begin(), vol.value.end()) - vol.value.begin();
  const Point3 p = vol.point(static_cast<std::size_t>(peak));
  std::printf("max at (%g, %g, %g)\n", p.x1, p.x2, p.x3);
  return 0;
}

int cmd_verify(const Options& o) {
  const RunConfig cfg = load(o);
  const auto results = tool::run_checks(cfg, cfg.seed);
  nlohmann::json report = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-28s residual=%.3e threshold=%.1e %s\n", r.name.c_str(), r.residual,
                r.threshold, r.passed() ? "PASS" : "FAIL");
    report.push_back({{"check", r.name},
                      {"residual", r.residual},
                      {"threshold", r.threshold},
                      {"passed", r.passed()}});
    ok = ok && r.passed();
  }
  std::ofstream(cfg.output / "verify.json") << report.dump(1) << '\n';
  return ok ? 0 : 1;
}

int cmd_export(const Options& o) {
  write_volume(o.to, read_volume(o.input));
  std::printf("wrote %s\n", o.to.c_str());
  return 0;
}

void report(std::string_view kind, const std::string& message, const std::string& field = {}) {
  nlohmann::json j{{"error", {{"kind", kind}, {"message", message}}}};
  if (!field.empty()) j["error"]["field"] = field;
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling-type imaging in a terminating rectangular waveguide"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", o.output, "output directory (overrides config)");
    sub->add_option("--threads", o.threads, "worker thread cap (0 = default)");
    sub->add_option("--seed", o.seed, "noise seed (overrides config)");
    sub->add_option("--model", o.model, "forward model (overrides config)")
        ->check(CLI::IsMember({"born", "ls"}));
  };

  auto* modes = app.add_subcommand("modes", "print the mode table and counts");
  common(modes);
  modes->add_flag("--evanescent", o.evanescent, "include the evanescent modes kept for sums");
  auto* synth = app.add_subcommand("synthesize", "write point-source data and U");
  common(synth);
  auto* image = app.add_subcommand("image", "image U (with configured noise)");
  common(image);
  image->add_option("--input", o.input, "U file (default <output>/U.wgum)");
  auto* psf = app.add_subcommand("psf", "point-spread volume for a point x*");
  common(psf);
  psf->add_option("--xstar", o.xstar, "x1,x2,x3")->required();
  auto* verify = app.add_subcommand("verify", "run the self-consistency checks");
  common(verify);
  auto* exp = app.add_subcommand("export", "convert an image volume between CSV and VTK");
  exp->add_option("--input", o.input, "source volume (.csv or .vtk)")
      ->required()
      ->check(CLI::ExistingFile);
  exp->add_option("--to", o.to, "destination volume (.csv or .vtk)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("UsageError", e.what());
    return 2;
  }

  try {
    set_thread_count(o.threads);
    if (*modes) return cmd_modes(o);
    if (*synth) return cmd_synthesize(o);
    if (*image) return cmd_image(o);
    if (*psf) return cmd_psf(o);
    if (*verify) return cmd_verify(o);
    if (*exp) return cmd_export(o);
  } catch (const ConfigError& e) {
    report(to_string(e.kind()), e.what(), e.field());
    return 1;
  } catch (const Error& e) {
    report(to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    report("InternalError", e.what());
    return 1;
  }
  return 0;
}
