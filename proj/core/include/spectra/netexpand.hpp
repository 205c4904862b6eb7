#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "spectra/raster.hpp"

namespace spectra {

/// 4-D convolution kernel [out_channels, in_channels, k_h, k_w] of f32,
/// row-major, with optional per-input-channel wavelengths.
class WeightTensor {
 public:
  WeightTensor(std::array<std::uint32_t, 4> shape, std::vector<float> values,
               std::vector<float> in_channel_wavelengths = {});

  const std::array<std::uint32_t, 4>& shape() const noexcept { return shape_; }
  std::uint32_t out_channels() const noexcept { return shape_[0]; }
  std::uint32_t in_channels() const noexcept { return shape_[1]; }
  std::size_t kernel_size() const noexcept { return std::size_t{shape_[2]} * shape_[3]; }
  std::span<const float> values() const noexcept { return values_; }
  /// Empty when the tensor carries no wavelength tags.
  std::span<const float> wavelengths() const noexcept { return wavelengths_; }

  float at(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const {
    return values_[((o * shape_[1] + i) * shape_[2] + ky) * shape_[3] + kx];
  }

  /// Bitwise equality of values (so NaN payloads and signed zeros count).
  bool bit_equal(const WeightTensor& other) const noexcept;

 private:
  std::array<std::uint32_t, 4> shape_;
  std::vector<float> values_;
  std::vector<float> wavelengths_;
};

enum class ExpansionStrategy { Random, ReplicateCyclic, ReplicateNearestWavelength };
enum class ScaleMode { None, DivideByMultiplicity };

struct ExpansionSpec {
  ExpansionStrategy strategy = ExpansionStrategy::ReplicateNearestWavelength;
  std::vector<BandInfo> target_bands;
  std::uint64_t seed = 0;  // Random only
  ScaleMode scale = ScaleMode::None;
};

/// Source input channel feeding each target band under a replicate
/// strategy. Target bands within ±1 nm of a source wavelength always map
/// to that source channel.
std::vector<std::size_t> replication_sources(std::span<const float> source_wavelengths,
                                             std::span<const BandInfo> target_bands,
                                             ExpansionStrategy strategy);

/// Widens a 3-input-channel first-layer kernel to one input channel per
/// target band. Channels at the source RGB wavelengths are copied bit for
/// bit; the rest follow the strategy. An untagged source is taken to be
/// in red, green, blue order (659, 546, 478 nm); the nearest-wavelength
/// strategy requires explicit tags and throws MissingWavelengths otherwise.
WeightTensor expand(const WeightTensor& w, const ExpansionSpec& spec);

/// Little-endian "WTNS" container, version 1.
void write_tensor(const WeightTensor& w, const std::filesystem::path& path);
WeightTensor read_tensor(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_tensor(const WeightTensor& w);
WeightTensor decode_tensor(std::span<const std::uint8_t> bytes);

}  // namespace spectra
