#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "spectra/error.hpp"
#include "spectra/raster.hpp"
#include "spectra/tiff.hpp"
#include "temp_dir.hpp"
#include "tiff_builder.hpp"

namespace spectra {
namespace {

std::vector<BandInfo> named_bands(std::size_t n) {
  std::vector<BandInfo> b;
  for (std::size_t i = 0; i < n; ++i) b.push_back({"b" + std::to_string(i), 400.0 + 10.0 * i});
  return b;
}

MultibandImage random_image(std::size_t w, std::size_t h, std::vector<BandInfo> bands, int bits,
                            unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(0, (1 << bits) - 1);
  std::vector<std::uint16_t> px(w * h * bands.size());
  for (auto& v : px) v = static_cast<std::uint16_t>(d(rng));
  return MultibandImage(w, h, std::move(bands), bits, 1.24, 1.24, std::move(px));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::Io;
}

TEST(MultibandImage, RejectsBrokenInvariants) {
  const auto bands = named_bands(1);
  EXPECT_THROW(MultibandImage(0, 1, bands, 8, 1, 1, {}), Error);
  EXPECT_THROW(MultibandImage(1, 1, bands, 12, 1, 1, {0}), Error);
  EXPECT_THROW(MultibandImage(1, 1, bands, 8, 1, 1, {256}), Error);
  EXPECT_THROW(MultibandImage(2, 1, bands, 8, 1, 1, {0}), Error);
  EXPECT_THROW(MultibandImage(1, 1, bands, 8, 0.0, 1, {0}), Error);
  EXPECT_THROW(MultibandImage(1, 1, {}, 8, 1, 1, {}), Error);
  EXPECT_THROW(MultibandImage(1, 1, {{"a", 500}, {"a", 600}}, 8, 1, 1, {0, 0}), Error);
  EXPECT_THROW(MultibandImage(1, 1, {{"a", 0}}, 8, 1, 1, {0}), Error);
  EXPECT_NO_THROW(MultibandImage(1, 1, bands, 13, 1, 1, {8191}));
}

TEST(BitDepth, Inference) {
  EXPECT_EQ(infer_bit_depth(0), 8);
  EXPECT_EQ(infer_bit_depth(255), 8);
  EXPECT_EQ(infer_bit_depth(256), 11);
  EXPECT_EQ(infer_bit_depth(2047), 11);
  EXPECT_EQ(infer_bit_depth(2048), 13);
  EXPECT_EQ(infer_bit_depth(8012), 13);
  EXPECT_EQ(infer_bit_depth(8191), 13);
  EXPECT_EQ(infer_bit_depth(8192), 16);
  EXPECT_EQ(infer_bit_depth(65535), 16);
}

class LoadScene : public ::testing::Test {
 protected:
  testing::TempDir dir{"raster"};
};

TEST_F(LoadScene, MultispectralThirteenBitInSixteenBitContainer) {
  testing::TiffSpec s;
  s.width = 110;
  s.height = 102;
  s.samples = 8;
  s.bits = 16;
  s.planes.resize(110 * 102 * 8);
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> d(0, 8011);
  for (auto& v : s.planes) v = static_cast<std::uint16_t>(d(rng));
  s.planes[12345] = 8012;
  s.pixel_scale = std::array<double, 2>{1.24, 1.24};
  const auto path = dir / "lr.tif";
  testing::write_file(path, testing::build_tiff(s));

  const auto img = load_scene(path);
  EXPECT_EQ(img.width(), 110u);
  EXPECT_EQ(img.height(), 102u);
  EXPECT_EQ(img.band_count(), 8u);
  EXPECT_EQ(img.bit_depth(), 13);
  EXPECT_EQ(img.max_sample(), 8012);
  EXPECT_EQ(img.bands(), worldview2_multispectral_bands());
  EXPECT_DOUBLE_EQ(img.gsd_x(), 1.24);
  EXPECT_TRUE(std::equal(img.pixels().begin(), img.pixels().end(), s.planes.begin()));
}

TEST_F(LoadScene, ZeroImage) {
  testing::TiffSpec s;
  s.width = 2;
  s.height = 2;
  s.bits = 16;
  s.planes = {0, 0, 0, 0};
  const auto path = dir / "zero.tif";
  testing::write_file(path, testing::build_tiff(s));
  const auto img = load_scene(path);
  EXPECT_EQ(img.bit_depth(), 8);
  EXPECT_EQ(std::vector<std::uint16_t>(img.pixels().begin(), img.pixels().end()),
            (std::vector<std::uint16_t>{0, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(img.gsd_x(), 1.0);
}

TEST_F(LoadScene, HighResolutionRgb) {
  testing::TiffSpec s;
  s.width = 439;
  s.height = 406;
  s.samples = 3;
  s.bits = 8;
  s.tiled = true;
  s.tile_w = s.tile_h = 64;
  s.deflate = true;
  s.planes.resize(439 * 406 * 3);
  for (std::size_t i = 0; i < s.planes.size(); ++i) s.planes[i] = static_cast<std::uint16_t>(i * 7 % 256);
  const auto path = dir / "hr.tif";
  testing::write_file(path, testing::build_tiff(s));
  const auto img = load_scene(path);
  EXPECT_EQ(img.bit_depth(), 8);
  EXPECT_EQ(img.band_count(), 3u);
  EXPECT_EQ(img.bands(), worldview2_rgb_bands());
}

TEST_F(LoadScene, BandSourcesAndOverrides) {
  const std::vector<std::uint16_t> planes{100, 200, 300, 400, 500, 600};
  const auto path = dir / "pair.tif";
  tiff::write(path, 3, 1, 2, 16, planes);

  // No sidecar, unknown sensor: placeholder bands.
  EXPECT_EQ(load_scene(path).bands().size(), 2u);

  const std::vector<BandInfo> sidecar{{"red", 659}, {"nir1", 883}};
  write_band_sidecar(band_sidecar_path(path), sidecar);
  EXPECT_EQ(band_sidecar_path(path).filename(), "pair.bands.json");
  EXPECT_EQ(load_scene(path).bands(), sidecar);

  LoadOptions explicit_bands;
  explicit_bands.bands = std::vector<BandInfo>{{"x", 500}, {"y", 600}};
  EXPECT_EQ(load_scene(path, explicit_bands).bands(), *explicit_bands.bands);

  LoadOptions wrong_count;
  wrong_count.bands = std::vector<BandInfo>{{"x", 500}};
  EXPECT_THROW(load_scene(path, wrong_count), Error);

  LoadOptions depth;
  depth.bit_depth = 16;
  EXPECT_EQ(load_scene(path, depth).bit_depth(), 16);
  depth.bit_depth = 8;  // 600 does not fit
  EXPECT_THROW(load_scene(path, depth), Error);
}

TEST(Requantize, ThirteenToEight) {
  const MultibandImage img(4, 1, named_bands(1), 13, 1, 1, {8191, 0, 4096, 16});
  const auto q = requantize(img, 8);
  EXPECT_EQ(q.bit_depth(), 8);
  EXPECT_EQ(q.at(0, 0, 0), 255);
  EXPECT_EQ(q.at(0, 0, 1), 0);
  // 4096 * 255 / 8191 = 127.5155...
  EXPECT_EQ(q.at(0, 0, 2), 128);
  EXPECT_EQ(q.at(0, 0, 3), 0);  // 0.498
}

TEST(Requantize, MatchesFloatingPointFormula) {
  for (auto [src, dst] : {std::pair{13, 8}, {16, 8}, {16, 13}, {11, 8}, {13, 11}}) {
    const double sm = (1 << src) - 1, dm = (1 << dst) - 1;
    std::vector<std::uint16_t> px(static_cast<std::size_t>(sm) + 1);
    std::iota(px.begin(), px.end(), 0);
    const MultibandImage img(px.size(), 1, named_bands(1), src, 1, 1, px);
    const auto q = requantize(img, dst);
    for (std::size_t v = 0; v < px.size(); ++v) {
      const double exact = static_cast<double>(v) * dm / sm;
      // round-half-up; exact halves cannot occur for these odd maxima
      ASSERT_EQ(q.at(0, 0, v), static_cast<std::uint16_t>(std::floor(exact + 0.5))) << src << "->" << dst << " v=" << v;
    }
  }
}

TEST(Requantize, IdempotentAndMonotone) {
  const auto img = random_image(40, 30, named_bands(3), 13, 1);
  const auto once = requantize(img, 8);
  EXPECT_EQ(requantize(once, 8), once);
  for (std::size_t i = 0; i < img.pixels().size(); ++i) {
    for (std::size_t j = i + 1; j < std::min(img.pixels().size(), i + 50); ++j) {
      if (img.pixels()[i] <= img.pixels()[j]) {
        EXPECT_LE(once.pixels()[i], once.pixels()[j]);
      }
    }
  }
}

TEST(Requantize, UpwardTargetRejected) {
  const auto img = random_image(2, 2, named_bands(1), 8, 2);
  EXPECT_EQ(code_of([&] { requantize(img, 13); }), ErrorCode::InvalidTarget);
  EXPECT_EQ(code_of([&] { requantize(img, 7); }), ErrorCode::InvalidTarget);
}

TEST(Requantize, PercentileStretch) {
  std::vector<std::uint16_t> px(100);
  std::iota(px.begin(), px.end(), 1000);
  const MultibandImage img(100, 1, named_bands(1), 13, 1, 1, px);
  const auto q = requantize_percentile(img, 8);
  EXPECT_EQ(q.bit_depth(), 8);
  EXPECT_EQ(q.at(0, 0, 0), 0);
  EXPECT_EQ(q.at(0, 0, 99), 255);
  for (std::size_t i = 1; i < 100; ++i) EXPECT_LE(q.at(0, 0, i - 1), q.at(0, 0, i));
}

double band_mean(const MultibandImage& img, std::size_t b) {
  const auto p = img.band(b);
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

TEST(Rescale, TableDimensions) {
  const auto img = random_image(110, 102, named_bands(8), 13, 3);
  const auto up = rescale(img, 5);
  EXPECT_EQ(up.width(), 550u);
  EXPECT_EQ(up.height(), 510u);
  EXPECT_EQ(up.band_count(), 8u);
  EXPECT_EQ(up.bit_depth(), 13);
  EXPECT_DOUBLE_EQ(up.gsd_x(), 1.24 / 5);
}

TEST(Rescale, FactorOneIsIdentity) {
  const auto img = random_image(17, 9, named_bands(3), 11, 4);
  EXPECT_EQ(rescale(img, 1), img);
  EXPECT_EQ(rescale(img, 1, ResampleMethod::Nearest), img);
}

TEST(Rescale, ConstantBandStaysConstant) {
  const MultibandImage img(2, 2, named_bands(1), 8, 1, 1, {7, 7, 7, 7});
  for (auto m : {ResampleMethod::Bilinear, ResampleMethod::Nearest}) {
    const auto up = rescale(img, 3, m);
    EXPECT_EQ(up.width(), 6u);
    EXPECT_EQ(up.height(), 6u);
    for (auto v : up.pixels()) EXPECT_EQ(v, 7);
  }
}

TEST(Rescale, LinearGradientMeanPreserved) {
  // Bilinear taps fall on multiples of 1/(2f); a slope of 120 per pixel
  // keeps every interpolated value integral for f = 2..5, so the check is
  // not blurred by rounding to integer samples.
  std::vector<std::uint16_t> px;
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 8; ++c) px.push_back(static_cast<std::uint16_t>(1000 + 120 * c + 240 * r));
  const MultibandImage img(8, 6, named_bands(1), 16, 1, 1, px);
  for (std::size_t f : {2u, 3u, 4u, 5u}) {
    const auto up = rescale(img, f);
    EXPECT_NEAR(band_mean(up, 0), band_mean(img, 0), 1e-6 * band_mean(img, 0)) << "factor " << f;
  }
}

TEST(Rescale, NearestReplicatesBlocks) {
  const MultibandImage img(2, 1, named_bands(1), 8, 2, 2, {10, 20});
  const auto up = rescale(img, 2, ResampleMethod::Nearest);
  EXPECT_EQ(std::vector<std::uint16_t>(up.pixels().begin(), up.pixels().end()),
            (std::vector<std::uint16_t>{10, 10, 20, 20, 10, 10, 20, 20}));
  EXPECT_DOUBLE_EQ(up.gsd_x(), 1.0);
}

TEST(Rescale, ZeroFactorRejected) {
  const auto img = random_image(2, 2, named_bands(1), 8, 5);
  EXPECT_THROW(rescale(img, 0), Error);
}

MultibandImage wv2_image() {
  return random_image(5, 4, worldview2_multispectral_bands(), 13, 6);
}

TEST(ComposeBands, RgbAndFalseColor) {
  const auto img = wv2_image();
  const std::vector<double> rgb{659, 546, 478};
  const auto out = compose_bands(img, rgb);
  ASSERT_EQ(out.band_count(), 3u);
  EXPECT_EQ(out.bands()[0].name, "red");
  EXPECT_EQ(out.bands()[2].name, "blue");
  // red is file band 4, blue is band 1
  EXPECT_TRUE(std::ranges::equal(out.band(0), img.band(4)));
  EXPECT_TRUE(std::ranges::equal(out.band(2), img.band(1)));

  const std::vector<double> fc{427, 608, 724};
  const auto false_color = compose_bands(img, fc);
  EXPECT_EQ(false_color.bands()[0].name, "coastal");
  EXPECT_EQ(false_color.bands()[1].name, "yellow");
  EXPECT_EQ(false_color.bands()[2].name, "red_edge");
  EXPECT_TRUE(std::ranges::equal(false_color.band(1), img.band(3)));
}

TEST(ComposeBands, ToleranceAndErrors) {
  const auto img = wv2_image();
  const std::vector<double> near{659.8, 545.1};
  EXPECT_EQ(compose_bands(img, near).bands()[1].name, "green");
  const std::vector<double> missing{650};
  EXPECT_EQ(code_of([&] { compose_bands(img, missing); }), ErrorCode::BandNotFound);
  EXPECT_THROW(compose_bands(img, std::vector<double>{}), Error);
}

TEST(ComposeBands, FullSelectionAndProjection) {
  const auto img = wv2_image();
  std::vector<double> all;
  for (const auto& b : img.bands()) all.push_back(b.center_wavelength_nm);
  EXPECT_EQ(compose_bands(img, all), img);
  const std::vector<double> sel{883, 427, 659};
  const auto once = compose_bands(img, sel);
  EXPECT_EQ(compose_bands(once, sel), once);
}

TEST(Crop, Window) {
  const auto img = random_image(6, 5, named_bands(2), 8, 7);
  const auto c = crop(img, 1, 2, 4, 5);
  EXPECT_EQ(c.width(), 3u);
  EXPECT_EQ(c.height(), 3u);
  EXPECT_EQ(c.at(1, 0, 0), img.at(1, 2, 1));
  EXPECT_EQ(c.at(0, 2, 2), img.at(0, 4, 3));
  EXPECT_THROW(crop(img, 3, 0, 3, 2), Error);
  EXPECT_THROW(crop(img, 0, 0, 7, 2), Error);
}

}  // namespace
}  // namespace spectra
