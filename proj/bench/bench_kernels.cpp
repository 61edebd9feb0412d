// Serial reference vs OpenMP kernels for rendering and batch SDF evaluation.

#include <benchmark/benchmark.h>

#include <random>

#include "flatmarch/render.hpp"
#include "flatmarch/sdf.hpp"

using namespace flatmarch;

namespace {

const SceneConfig& scene() {
  static const SceneConfig s = builtin_scene("cube_net");
  return s;
}

std::vector<Point3> sample_points(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 2.5), z(0, 1);
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), z(rng)};
  return pts;
}

void BM_RenderSerial(benchmark::State& state) {
  const CameraFrame cam = CameraFrame::from_scene(scene());
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_image_serial(scene(), cam, side, side));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

void BM_RenderOpenMP(benchmark::State& state) {
  const CameraFrame cam = CameraFrame::from_scene(scene());
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_image(scene(), cam, side, side, 0));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

void BM_SdfBatchSerial(benchmark::State& state) {
  const auto pts = sample_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eval_scene_sdf_batch_serial(scene(), pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SdfBatchOpenMP(benchmark::State& state) {
  const auto pts = sample_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eval_scene_sdf_batch(scene(), pts, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RenderSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderOpenMP)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SdfBatchSerial)->Arg(1 << 14)->Arg(1 << 17);
BENCHMARK(BM_SdfBatchOpenMP)->Arg(1 << 14)->Arg(1 << 17);

BENCHMARK_MAIN();
