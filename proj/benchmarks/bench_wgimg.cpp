#include <benchmark/benchmark.h>

#include "wgimg/imaging.hpp"

using namespace wgimg;

namespace {

const WaveguideSpec kSquare{10.0, 10.0};

GreenEvaluator green_for(double k, double gap) {
  return GreenEvaluator(enumerate_modes(kSquare, k, EvanescentPolicy::decay(gap)), gap);
}

Scene voxel_block(int n) {
  std::vector<Voxel> v;
  for (int i = 0; i < n; ++i) v.push_back({{3.0 + 0.25 * i, 5.0, -5.0}, 0.0156, {2.0, 2.0}});
  return Scene(v);
}

}  // namespace

static void BM_EnumerateModes(benchmark::State& state) {
  const double k = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_modes(kSquare, k, EvanescentPolicy::decay(1.0)));
  }
}
BENCHMARK(BM_EnumerateModes)->Arg(1)->Arg(3)->Arg(5);

static void BM_GreenHalf(benchmark::State& state) {
  const GreenEvaluator g = green_for(3.0, static_cast<double>(state.range(0)) / 4.0);
  const Point3 x{2.3, 4.1, -5.0};
  const Point3 y{6.7, 8.2, -5.0 - static_cast<double>(state.range(0)) / 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(g.half(x, y));
  state.counters["terms"] = static_cast<double>(g.term_count(x, y, false));
}
BENCHMARK(BM_GreenHalf)->Arg(2)->Arg(4)->Arg(16);

static void BM_SynthesizeBorn(benchmark::State& state) {
  const GreenEvaluator g = green_for(3.0, 4.0);
  const MeasurementGrid grid(kSquare, -10.0, static_cast<int>(state.range(0)),
                             static_cast<int>(state.range(0)));
  const Scene scene = voxel_block(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_data(g, scene, grid, ForwardModel::born()));
  }
}
BENCHMARK(BM_SynthesizeBorn)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_AssembleU(benchmark::State& state) {
  const GreenEvaluator g = green_for(3.0, 4.0);
  const MeasurementGrid grid(kSquare, -10.0, 24, 24);
  const PointSourceData data = synthesize_data(g, voxel_block(1), grid, ForwardModel::born());
  for (auto _ : state) benchmark::DoNotOptimize(assemble_U(g.basis(), data, grid));
}
BENCHMARK(BM_AssembleU)->Unit(benchmark::kMillisecond);

static void BM_ImagingValue(benchmark::State& state) {
  const GreenEvaluator g = green_for(3.0, 4.0);
  const MeasurementGrid grid(kSquare, -10.0, 24, 24);
  const DataMatrixU U = assemble_U(
      g.basis(), synthesize_data(g, voxel_block(1), grid, ForwardModel::born()), grid);
  const ModeBasis basis = enumerate_modes(kSquare, 3.0, EvanescentPolicy::propagating_only());
  const Point3 z{4.4, 5.6, -4.7};
  for (auto _ : state) benchmark::DoNotOptimize(imaging_value(basis, U, z));
}
BENCHMARK(BM_ImagingValue);
BENCHMARK_MAIN();
