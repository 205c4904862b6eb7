#include "spectra/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "spectra/error.hpp"
#include "spectra/tiff.hpp"

namespace spectra {

std::vector<BandInfo> worldview2_rgb_bands() {
  return {{"red", 659.0}, {"green", 546.0}, {"blue", 478.0}};
}

std::vector<BandInfo> worldview2_multispectral_bands() {
  return {{"coastal", 427.0}, {"blue", 478.0},     {"green", 546.0}, {"yellow", 608.0},
          {"red", 659.0},     {"red_edge", 724.0}, {"nir1", 883.0},  {"nir2", 949.0}};
}

bool is_supported_bit_depth(int bits) noexcept {
  return bits == 8 || bits == 11 || bits == 13 || bits == 16;
}

int infer_bit_depth(std::uint16_t max_sample) noexcept {
  for (int bits : {8, 11, 13}) {
    if (max_sample < (1u << bits)) return bits;
  }
  return 16;
}

MultibandImage::MultibandImage(std::size_t width, std::size_t height, std::vector<BandInfo> bands,
                               int bit_depth, double gsd_x, double gsd_y,
                               std::vector<std::uint16_t> pixels)
    : width_(width),
      height_(height),
      bands_(std::move(bands)),
      bit_depth_(bit_depth),
      gsd_x_(gsd_x),
      gsd_y_(gsd_y),
      pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
  if (bands_.empty()) throw Error(ErrorCode::InvalidArgument, "image needs at least one band");
  if (!is_supported_bit_depth(bit_depth_))
    throw Error(ErrorCode::InvalidArgument, "unsupported bit depth " + std::to_string(bit_depth_));
  if (!(gsd_x_ > 0.0) || !(gsd_y_ > 0.0) || !std::isfinite(gsd_x_) || !std::isfinite(gsd_y_))
    throw Error(ErrorCode::InvalidArgument, "ground sample distance must be positive");
  std::set<std::string> names;
  for (const auto& b : bands_) {
    if (!(b.center_wavelength_nm > 0.0))
      throw Error(ErrorCode::InvalidArgument, "band '" + b.name + "' has non-positive wavelength");
    if (!names.insert(b.name).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate band name '" + b.name + "'");
  }
  if (pixels_.size() != width_ * height_ * bands_.size())
    throw Error(ErrorCode::InvalidArgument, "pixel buffer size does not match width*height*bands");
  if (bit_depth_ < 16 && max_sample() >= (1u << bit_depth_))
    throw Error(ErrorCode::InvalidArgument,
                "sample value exceeds declared bit depth " + std::to_string(bit_depth_));
}

std::span<const std::uint16_t> MultibandImage::band(std::size_t b) const {
  if (b >= bands_.size()) throw Error(ErrorCode::InvalidArgument, "band index out of range");
  return std::span(pixels_).subspan(b * width_ * height_, width_ * height_);
}

std::uint16_t MultibandImage::max_sample() const noexcept {
  return pixels_.empty() ? 0 : *std::max_element(pixels_.begin(), pixels_.end());
}

std::filesystem::path band_sidecar_path(const std::filesystem::path& scene) {
  auto p = scene;
  p.replace_extension(".bands.json");
  return p;
}

std::vector<BandInfo> read_band_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<BandInfo> bands;
  try {
    const auto doc = nlohmann::json::parse(in);
    if (!doc.is_array()) throw Error(ErrorCode::InvalidArgument, "band sidecar must be a JSON array");
    for (const auto& item : doc) {
      bands.push_back({item.at("name").get<std::string>(), item.at("wavelength_nm").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
  return bands;
}

void write_band_sidecar(const std::filesystem::path& path, std::span<const BandInfo> bands) {
  auto doc = nlohmann::json::array();
  for (const auto& b : bands) doc.push_back({{"name", b.name}, {"wavelength_nm", b.center_wavelength_nm}});
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

namespace {

std::vector<BandInfo> default_bands(std::size_t count) {
  if (count == 3) return worldview2_rgb_bands();
  if (count == 8) return worldview2_multispectral_bands();
  // Unknown sensors get placeholder wavelengths 1, 2, ... nm so the image
  // invariants hold; callers should supply a sidecar for real data.
  std::vector<BandInfo> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back({"band_" + std::to_string(i + 1), static_cast<double>(i + 1)});
  return out;
}

}  // namespace

MultibandImage load_scene(const std::filesystem::path& path, const LoadOptions& options) {
  auto raster = tiff::read(path);
  const auto& info = raster.info;

  std::vector<BandInfo> bands;
  if (options.bands) {
    bands = *options.bands;
  } else if (const auto sidecar = band_sidecar_path(path); std::filesystem::exists(sidecar)) {
    bands = read_band_sidecar(sidecar);
  } else {
    bands = default_bands(info.samples_per_pixel);
  }
  if (bands.size() != info.samples_per_pixel)
    throw Error(ErrorCode::InvalidArgument, "band metadata lists " + std::to_string(bands.size()) +
                                                " bands but file has " +
                                                std::to_string(info.samples_per_pixel));

  const auto max_it = std::max_element(raster.planes.begin(), raster.planes.end());
  const std::uint16_t max_sample = max_it == raster.planes.end() ? 0 : *max_it;
  int bits = info.bits_per_sample == 8 ? 8 : infer_bit_depth(max_sample);
  if (options.bit_depth) {
    if (!is_supported_bit_depth(*options.bit_depth) ||
        (*options.bit_depth < 16 && max_sample >= (1u << *options.bit_depth)))
      throw Error(ErrorCode::InvalidArgument,
                  "declared bit depth " + std::to_string(*options.bit_depth) +
                      " cannot hold sample " + std::to_string(max_sample));
    bits = *options.bit_depth;
  }

  const double gsd_x = info.pixel_scale ? (*info.pixel_scale)[0] : options.default_gsd;
  const double gsd_y = info.pixel_scale ? (*info.pixel_scale)[1] : options.default_gsd;
  return MultibandImage(info.width, info.height, std::move(bands), bits, gsd_x, gsd_y,
                        std::move(raster.planes));
}

MultibandImage requantize(const MultibandImage& img, int target_bits) {
  if (!is_supported_bit_depth(target_bits))
    throw Error(ErrorCode::InvalidTarget, "target depth must be one of 8, 11, 13, 16");
  if (target_bits > img.bit_depth())
    throw Error(ErrorCode::InvalidTarget, "cannot requantize " + std::to_string(img.bit_depth()) +
                                              "-bit data up to " + std::to_string(target_bits) +
                                              " bits");
  const std::uint64_t src_max = (1ull << img.bit_depth()) - 1;
  const std::uint64_t dst_max = (1ull << target_bits) - 1;
  std::vector<std::uint16_t> out(img.pixels().size());
  // Integer round-half-up of v * dst_max / src_max.
  std::transform(img.pixels().begin(), img.pixels().end(), out.begin(), [&](std::uint16_t v) {
    return static_cast<std::uint16_t>((2 * v * dst_max + src_max) / (2 * src_max));
  });
  return MultibandImage(img.width(), img.height(), img.bands(), target_bits, img.gsd_x(),
                        img.gsd_y(), std::move(out));
}

MultibandImage requantize_percentile(const MultibandImage& img, int target_bits, double low_pct,
                                     double high_pct) {
  if (!is_supported_bit_depth(target_bits) || target_bits > img.bit_depth())
    throw Error(ErrorCode::InvalidTarget, "invalid percentile-stretch target depth");
  if (!(low_pct >= 0.0 && low_pct < high_pct && high_pct <= 100.0))
    throw Error(ErrorCode::InvalidArgument, "percentiles must satisfy 0 <= low < high <= 100");
  const double dst_max = static_cast<double>((1u << target_bits) - 1);
  const std::size_t plane = img.width() * img.height();
  std::vector<std::uint16_t> out(img.pixels().size());
  for (std::size_t b = 0; b < img.band_count(); ++b) {
    const auto src = img.band(b);
    std::vector<std::uint16_t> sorted(src.begin(), src.end());
    std::sort(sorted.begin(), sorted.end());
    const auto rank = [&](double pct) {
      const auto idx = static_cast<std::size_t>(std::lround(pct / 100.0 * static_cast<double>(plane - 1)));
      return static_cast<double>(sorted[idx]);
    };
    const double lo = rank(low_pct);
    const double hi = rank(high_pct);
    for (std::size_t i = 0; i < plane; ++i) {
      double v = hi > lo ? (static_cast<double>(src[i]) - lo) / (hi - lo) : 0.0;
      v = std::clamp(v, 0.0, 1.0);
      out[b * plane + i] = static_cast<std::uint16_t>(std::lround(v * dst_max));
    }
  }
  return MultibandImage(img.width(), img.height(), img.bands(), target_bits, img.gsd_x(),
                        img.gsd_y(), std::move(out));
}

MultibandImage rescale(const MultibandImage& img, std::size_t factor, ResampleMethod method) {
  if (factor == 0) throw Error(ErrorCode::InvalidArgument, "rescale factor must be >= 1");
  if (factor == 1) return img;
  const std::size_t w = img.width(), h = img.height();
  const std::size_t ow = w * factor, oh = h * factor;
  const double f = static_cast<double>(factor);
  std::vector<std::uint16_t> out(ow * oh * img.band_count());

  // Output pixel centres map to source coordinates (i + 0.5) / f - 0.5,
  // clamped to the source grid; the mapping is mirror-symmetric.
  struct Tap {
    std::size_t lo, hi;
    double t;
  };
  const auto taps = [&](std::size_t n_out, std::size_t n_in) {
    std::vector<Tap> v(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
      const double s = std::clamp((static_cast<double>(i) + 0.5) / f - 0.5, 0.0,
                                  static_cast<double>(n_in - 1));
      const auto lo = static_cast<std::size_t>(std::floor(s));
      v[i] = {lo, std::min(lo + 1, n_in - 1), s - static_cast<double>(lo)};
    }
    return v;
  };
  const auto xs = taps(ow, w);
  const auto ys = taps(oh, h);

  for (std::size_t b = 0; b < img.band_count(); ++b) {
    const auto src = img.band(b);
    auto* dst = out.data() + b * ow * oh;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        if (method == ResampleMethod::Nearest) {
          dst[y * ow + x] = src[(y / factor) * w + x / factor];
          continue;
        }
        const auto& tx = xs[x];
        const auto& ty = ys[y];
        const double top = (1.0 - tx.t) * src[ty.lo * w + tx.lo] + tx.t * src[ty.lo * w + tx.hi];
        const double bot = (1.0 - tx.t) * src[ty.hi * w + tx.lo] + tx.t * src[ty.hi * w + tx.hi];
        dst[y * ow + x] = static_cast<std::uint16_t>(std::lround((1.0 - ty.t) * top + ty.t * bot));
      }
    }
  }
  return MultibandImage(ow, oh, img.bands(), img.bit_depth(), img.gsd_x() / f, img.gsd_y() / f,
                        std::move(out));
}

MultibandImage compose_bands(const MultibandImage& img, std::span<const double> wavelengths_nm) {
  if (wavelengths_nm.empty()) throw Error(ErrorCode::InvalidArgument, "empty band selection");
  const std::size_t plane = img.width() * img.height();
  std::vector<BandInfo> bands;
  std::vector<std::uint16_t> out;
  out.reserve(plane * wavelengths_nm.size());
  for (double want : wavelengths_nm) {
    std::size_t best = img.band_count();
    double best_delta = 1.0;
    for (std::size_t b = 0; b < img.band_count(); ++b) {
      const double delta = std::abs(img.bands()[b].center_wavelength_nm - want);
      if (delta <= best_delta && (best == img.band_count() || delta < best_delta)) {
        best = b;
        best_delta = delta;
      }
    }
    if (best == img.band_count())
      throw Error(ErrorCode::BandNotFound, "no band within 1 nm of " + std::to_string(want) + " nm");
    bands.push_back(img.bands()[best]);
    const auto src = img.band(best);
    out.insert(out.end(), src.begin(), src.end());
  }
  return MultibandImage(img.width(), img.height(), std::move(bands), img.bit_depth(), img.gsd_x(),
                        img.gsd_y(), std::move(out));
}

MultibandImage crop(const MultibandImage& img, std::size_t col0, std::size_t row0, std::size_t col1,
                    std::size_t row1) {
  if (col0 >= col1 || row0 >= row1 || col1 > img.width() || row1 > img.height())
    throw Error(ErrorCode::InvalidArgument, "crop window outside image");
  const std::size_t w = col1 - col0, h = row1 - row0;
  std::vector<std::uint16_t> out;
  out.reserve(w * h * img.band_count());
  for (std::size_t b = 0; b < img.band_count(); ++b) {
    const auto src = img.band(b);
    for (std::size_t y = row0; y < row1; ++y) {
      const auto first = src.begin() + static_cast<std::ptrdiff_t>(y * img.width() + col0);
      out.insert(out.end(), first, first + static_cast<std::ptrdiff_t>(w));
    }
  }
  return MultibandImage(w, h, img.bands(), img.bit_depth(), img.gsd_x(), img.gsd_y(), std::move(out));
}

}  // namespace spectra
