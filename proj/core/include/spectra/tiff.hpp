#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace spectra::tiff {

/// Layout facts from the first IFD; no pixel data is decoded.
struct Info {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t samples_per_pixel = 0;
  int bits_per_sample = 0;
  bool tiled = false;
  bool planar = false;
  int compression = 1;
  int predictor = 1;
  /// GeoTIFF ModelPixelScaleTag (x, y), meters per pixel for projected CRSs.
  std::optional<std::array<double, 2>> pixel_scale;
};

/// Decoded raster, samples widened to 16 bits and stored plane by plane.
struct Raster {
  Info info;
  std::vector<std::uint16_t> planes;
};

/// Baseline TIFF (classic, not BigTIFF), strips or tiles, chunky or planar,
/// uncompressed or deflate (with optional horizontal predictor), unsigned
/// 8- or 16-bit samples. Layout problems raise UnsupportedFormat; truncated
/// or inconsistent files raise CorruptRaster.
Info read_info(const std::filesystem::path& path);
Raster read(const std::filesystem::path& path);
Raster decode(std::span<const std::uint8_t> bytes);

/// Writes a little-endian, uncompressed, chunky, strip-organised TIFF.
/// `planes` holds `samples` planes of width*height values; bits is 8 or 16.
void write(const std::filesystem::path& path, std::size_t width, std::size_t height,
           std::size_t samples, int bits, std::span<const std::uint16_t> planes,
           std::optional<std::array<double, 2>> pixel_scale = std::nullopt);

}  // namespace spectra::tiff
