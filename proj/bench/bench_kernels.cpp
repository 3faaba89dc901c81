// OpenMP kernels against their serial references. Set OMP_NUM_THREADS to vary
// the thread count.

#include <map>

#include <benchmark/benchmark.h>

#include "psoed/forward_model.hpp"
#include "psoed/optimizer.hpp"
#include "psoed/scenes.hpp"
#include "psoed/serial_reference.hpp"

using namespace psoed;

namespace {

const Scene& scene(int size) {
  static std::map<int, Scene> cache;
  auto it = cache.find(size);
  if (it == cache.end()) {
    SceneSpec spec;
    spec.width = spec.height = size;
    spec.albedo = {AlbedoSpec::Kind::Checkerboard, 0.9, 0.5, 8};
    it = cache.emplace(size, generate(spec)).first;
  }
  return it->second;
}

const LightConfig kLights = face_camera(random_unit_config(4, 3));

template <bool Parallel>
void BM_RenderNoise(benchmark::State& st) {
  const Scene& s = scene(static_cast<int>(st.range(0)));
  const NoiseSpec noise = NoiseSpec::uniform(4, 0.02, 1);
  for (auto _ : st) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(add_noise(render_stack(s.normals, s.albedo, kLights), noise));
    } else {
      benchmark::DoNotOptimize(serial::add_noise(serial::render_stack(s.normals, s.albedo, kLights), noise));
    }
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

template <bool Parallel>
void BM_SolveMap(benchmark::State& st) {
  const Scene& s = scene(static_cast<int>(st.range(0)));
  const IntensityStack stack = add_noise(render_stack(s.normals, s.albedo, kLights), NoiseSpec::uniform(4, 0.02, 1));
  for (auto _ : st) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(solve_map(stack, kLights));
    } else {
      benchmark::DoNotOptimize(serial::solve_map(stack, kLights));
    }
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

template <bool Parallel>
void BM_ShapePrior(benchmark::State& st) {
  const Scene& s = scene(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(build_shape_prior(s.normals));
    } else {
      benchmark::DoNotOptimize(serial::build_shape_prior(s.normals));
    }
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

template <bool Parallel>
void BM_BaselineRandom(benchmark::State& st) {
  const ShapePrior prior = build_shape_prior(scene(64).normals);
  const int count = static_cast<int>(st.range(0));
  for (auto _ : st) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(baseline_random(count, 3, prior, 1));
    } else {
      benchmark::DoNotOptimize(serial::baseline_random(count, 3, prior, 1));
    }
  }
  st.SetItemsProcessed(st.iterations() * count);
}

}  // namespace

BENCHMARK(BM_RenderNoise<false>)->Name("render_noise/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderNoise<true>)->Name("render_noise/openmp")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveMap<false>)->Name("solve_map/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveMap<true>)->Name("solve_map/openmp")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShapePrior<false>)->Name("shape_prior/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShapePrior<true>)->Name("shape_prior/openmp")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BaselineRandom<false>)->Name("baseline_random/serial")->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BaselineRandom<true>)->Name("baseline_random/openmp")->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
