#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spectra {

struct BandInfo {
  std::string name;
  double center_wavelength_nm = 0.0;

  friend bool operator==(const BandInfo&, const BandInfo&) = default;
};

/// Red, green, blue centers of the WorldView-2 3-band product.
std::vector<BandInfo> worldview2_rgb_bands();
/// The eight WorldView-2 multispectral bands in file order (coastal ... NIR2).
std::vector<BandInfo> worldview2_multispectral_bands();

/// Multi-band raster of unsigned samples stored plane by plane
/// (band-major, then row-major within a band). Immutable once built.
class MultibandImage {
 public:
  /// Validates every invariant: positive dimensions, bit depth in
  /// {8, 11, 13, 16}, positive GSD, unique band names, positive
  /// wavelengths, pixel count, and every sample < 2^bit_depth.
  MultibandImage(std::size_t width, std::size_t height, std::vector<BandInfo> bands, int bit_depth,
                 double gsd_x, double gsd_y, std::vector<std::uint16_t> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t band_count() const noexcept { return bands_.size(); }
  const std::vector<BandInfo>& bands() const noexcept { return bands_; }
  int bit_depth() const noexcept { return bit_depth_; }
  double gsd_x() const noexcept { return gsd_x_; }
  double gsd_y() const noexcept { return gsd_y_; }
  std::span<const std::uint16_t> pixels() const noexcept { return pixels_; }

  std::span<const std::uint16_t> band(std::size_t b) const;
  std::uint16_t at(std::size_t b, std::size_t row, std::size_t col) const {
    return pixels_[(b * height_ + row) * width_ + col];
  }

  std::uint16_t max_sample() const noexcept;

  friend bool operator==(const MultibandImage&, const MultibandImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<BandInfo> bands_;
  int bit_depth_;
  double gsd_x_;
  double gsd_y_;
  std::vector<std::uint16_t> pixels_;
};

bool is_supported_bit_depth(int bits) noexcept;

/// Smallest depth in {8, 11, 13, 16} that holds `max_sample`.
int infer_bit_depth(std::uint16_t max_sample) noexcept;

struct LoadOptions {
  /// Band names and wavelengths in file order. When absent, the
  /// `<scene>.bands.json` sidecar is consulted, then built-in defaults.
  std::optional<std::vector<BandInfo>> bands;
  /// Declared bit depth; must hold every sample.
  std::optional<int> bit_depth;
  /// Used when the file carries no ModelPixelScale tag.
  double default_gsd = 1.0;
};

/// Reads a baseline TIFF scene. 13-bit data is expected in 16-bit
/// containers and is recognised from the sample range.
MultibandImage load_scene(const std::filesystem::path& path, const LoadOptions& options = {});

/// Sidecar path for `scene.tif`: `scene.bands.json`.
std::filesystem::path band_sidecar_path(const std::filesystem::path& scene);

/// Parses a sidecar: JSON array of {"name", "wavelength_nm"}.
std::vector<BandInfo> read_band_sidecar(const std::filesystem::path& path);
void write_band_sidecar(const std::filesystem::path& path, std::span<const BandInfo> bands);

/// Linear full-scale mapping v -> round(v * (2^t - 1) / (2^s - 1)).
MultibandImage requantize(const MultibandImage& img, int target_bits);

/// Per-band linear stretch between the `low_pct` and `high_pct`
/// percentiles, clamped, then scaled to `target_bits`.
MultibandImage requantize_percentile(const MultibandImage& img, int target_bits,
                                     double low_pct = 2.0, double high_pct = 98.0);

enum class ResampleMethod { Bilinear, Nearest };

/// Integer upsampling; output GSD is the input GSD divided by `factor`.
MultibandImage rescale(const MultibandImage& img, std::size_t factor,
                       ResampleMethod method = ResampleMethod::Bilinear);

/// Selects bands by center wavelength (±1 nm), in the requested order.
MultibandImage compose_bands(const MultibandImage& img, std::span<const double> wavelengths_nm);

/// Pixel window [col0, col1) x [row0, row1) across all bands.
MultibandImage crop(const MultibandImage& img, std::size_t col0, std::size_t row0, std::size_t col1,
                    std::size_t row1);

}  // namespace spectra
