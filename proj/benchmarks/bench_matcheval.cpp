#include <benchmark/benchmark.h>

#include <array>

#include "spectra/matcheval.hpp"
#include "spectra/stats.hpp"
#include "spectra/synth.hpp"

namespace {

std::vector<spectra::SceneEval> scenes(std::size_t n, spectra::DensityCategory density) {
  spectra::SynthSpec spec;
  spec.seed = 42;
  spec.n_scenes = n;
  spec.density = density;
  spec.detector = {0.8, 0.15, 0.2, 0.1, 1.0};
  return spectra::generate(spec);
}

void BM_MatchScene(benchmark::State& state) {
  const auto density = static_cast<spectra::DensityCategory>(state.range(0));
  const auto data = scenes(16, density);
  std::size_t i = 0, boxes = 0;
  for (auto _ : state) {
    const auto& s = data[i++ % data.size()];
    benchmark::DoNotOptimize(spectra::match(s.scene.gt, s.detections, 0.5, 0.5));
    boxes += s.scene.gt.size();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(boxes));
}
BENCHMARK(BM_MatchScene)
    ->Arg(static_cast<int>(spectra::DensityCategory::Low))
    ->Arg(static_cast<int>(spectra::DensityCategory::Moderate))
    ->Arg(static_cast<int>(spectra::DensityCategory::High));

void BM_Report(benchmark::State& state) {
  const auto data = scenes(200, spectra::DensityCategory::Moderate);
  const spectra::EvalOptions opts{static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(spectra::report(data, 0.5, 0.5, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_Report)->Arg(1)->Arg(4)->UseRealTime();

void BM_DefaultGrid(benchmark::State& state) {
  const auto data = scenes(200, spectra::DensityCategory::Moderate);
  const spectra::EvalOptions opts{static_cast<std::size_t>(state.range(0))};
  for (auto _ : state)
    benchmark::DoNotOptimize(spectra::f1_grid(data, spectra::kDefaultGridIou, spectra::kDefaultGridConf, opts));
}
BENCHMARK(BM_DefaultGrid)->Arg(1)->Arg(4)->UseRealTime();

void BM_TTest(benchmark::State& state) {
  const std::array<double, 5> a{0.41, 0.45, 0.38, 0.44, 0.40}, b{0.36, 0.39, 0.35, 0.40, 0.37};
  for (auto _ : state) benchmark::DoNotOptimize(spectra::ttest_unpaired(a, b, spectra::VarianceMode::Welch));
}
BENCHMARK(BM_TTest);

}  // namespace
