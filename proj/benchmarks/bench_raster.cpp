#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "spectra/raster.hpp"
#include "spectra/tiff.hpp"

namespace {

namespace fs = std::filesystem;

// A 650 x 650 8-band 16-bit scene, about the size of one WorldView-2 tile.
std::vector<std::uint8_t> scene_bytes() {
  constexpr std::size_t side = 650, bands = 8;
  std::vector<std::uint16_t> planes(side * side * bands);
  for (std::size_t i = 0; i < planes.size(); ++i) planes[i] = static_cast<std::uint16_t>((i * 2654435761u) % 2048);
  const auto path = fs::temp_directory_path() / "spectra_bench_scene.tif";
  spectra::tiff::write(path, side, side, bands, 16, planes, std::array<double, 2>{2.0, 2.0});
  std::ifstream in(path, std::ios::binary);
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), {}};
  fs::remove(path);
  return bytes;
}

void BM_TiffDecode(benchmark::State& state) {
  const auto bytes = scene_bytes();
  for (auto _ : state) benchmark::DoNotOptimize(spectra::tiff::decode(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_TiffDecode)->Unit(benchmark::kMillisecond);

void BM_Rescale(benchmark::State& state) {
  const auto r = spectra::tiff::decode(scene_bytes());
  const spectra::MultibandImage img(r.info.width, r.info.height, spectra::worldview2_multispectral_bands(), 11,
                                    2.0, 2.0, r.planes);
  const auto factor = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spectra::rescale(img, factor, spectra::ResampleMethod::Bilinear));
}
BENCHMARK(BM_Rescale)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
