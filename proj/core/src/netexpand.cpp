#include "spectra/netexpand.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "spectra/error.hpp"
#include "spectra/rng.hpp"

namespace spectra {

WeightTensor::WeightTensor(std::array<std::uint32_t, 4> shape, std::vector<float> values,
                           std::vector<float> in_channel_wavelengths)
    : shape_(shape), values_(std::move(values)), wavelengths_(std::move(in_channel_wavelengths)) {
  std::size_t n = 1;
  for (auto d : shape_) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "tensor dimensions must be positive");
    n *= d;
  }
  if (values_.size() != n)
    throw Error(ErrorCode::InvalidArgument, "tensor has " + std::to_string(values_.size()) +
                                                " values, shape needs " + std::to_string(n));
  if (!wavelengths_.empty() && wavelengths_.size() != shape_[1])
    throw Error(ErrorCode::InvalidArgument, "wavelength count must match input channels");
}

bool WeightTensor::bit_equal(const WeightTensor& other) const noexcept {
  return shape_ == other.shape_ && values_.size() == other.values_.size() &&
         std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(float)) == 0 &&
         wavelengths_.size() == other.wavelengths_.size() &&
         std::memcmp(wavelengths_.data(), other.wavelengths_.data(),
                     wavelengths_.size() * sizeof(float)) == 0;
}

namespace {

constexpr double kWavelengthTolerance = 1.0;
constexpr std::array<float, 3> kDefaultRgb{659.0f, 546.0f, 478.0f};

std::optional<std::size_t> exact_source(std::span<const float> source, double wavelength) {
  for (std::size_t c = 0; c < source.size(); ++c) {
    if (std::abs(static_cast<double>(source[c]) - wavelength) <= kWavelengthTolerance) return c;
  }
  return std::nullopt;
}

std::size_t nearest_source(std::span<const float> source, double wavelength) {
  std::size_t best = 0;
  double best_delta = std::abs(static_cast<double>(source[0]) - wavelength);
  for (std::size_t c = 1; c < source.size(); ++c) {
    const double delta = std::abs(static_cast<double>(source[c]) - wavelength);
    if (delta < best_delta || (delta == best_delta && source[c] > source[best])) {
      best = c;
      best_delta = delta;
    }
  }
  return best;
}

}  // namespace

std::vector<std::size_t> replication_sources(std::span<const float> source_wavelengths,
                                             std::span<const BandInfo> target_bands,
                                             ExpansionStrategy strategy) {
  if (source_wavelengths.empty())
    throw Error(ErrorCode::MissingWavelengths, "source channels carry no wavelengths");
  std::vector<std::size_t> sources;
  sources.reserve(target_bands.size());
  for (std::size_t j = 0; j < target_bands.size(); ++j) {
    const double wl = target_bands[j].center_wavelength_nm;
    if (const auto c = exact_source(source_wavelengths, wl)) {
      sources.push_back(*c);
    } else if (strategy == ExpansionStrategy::ReplicateCyclic) {
      sources.push_back(j % source_wavelengths.size());
    } else {
      sources.push_back(nearest_source(source_wavelengths, wl));
    }
  }
  return sources;
}

WeightTensor expand(const WeightTensor& w, const ExpansionSpec& spec) {
  if (w.in_channels() != 3)
    throw Error(ErrorCode::InvalidArgument, "source kernel must have 3 input channels");
  if (spec.target_bands.size() < 3)
    throw Error(ErrorCode::InvalidTarget, "need at least 3 target bands");
  for (const auto& b : spec.target_bands) {
    if (!(b.center_wavelength_nm > 0.0))
      throw Error(ErrorCode::MissingWavelengths, "target band '" + b.name + "' has no wavelength");
  }

  std::vector<float> source_wl(w.wavelengths().begin(), w.wavelengths().end());
  if (source_wl.empty()) {
    if (spec.strategy == ExpansionStrategy::ReplicateNearestWavelength)
      throw Error(ErrorCode::MissingWavelengths,
                  "nearest-wavelength expansion needs wavelength-tagged source channels");
    source_wl.assign(kDefaultRgb.begin(), kDefaultRgb.end());
  }

  const std::size_t out_ch = w.out_channels();
  const std::size_t in_src = w.in_channels();
  const std::size_t in_dst = spec.target_bands.size();
  const std::size_t kk = w.kernel_size();
  std::vector<float> values(out_ch * in_dst * kk);

  const auto copy_channel = [&](std::size_t src_c, std::size_t dst_c, float divisor) {
    for (std::size_t o = 0; o < out_ch; ++o) {
      const float* from = w.values().data() + (o * in_src + src_c) * kk;
      float* to = values.data() + (o * in_dst + dst_c) * kk;
      if (divisor == 1.0f) {
        std::memcpy(to, from, kk * sizeof(float));
      } else {
        for (std::size_t k = 0; k < kk; ++k) to[k] = from[k] / divisor;
      }
    }
  };

  if (spec.strategy == ExpansionStrategy::Random) {
    // Pooled per-channel spread of the source: sqrt(mean of channel variances).
    double pooled_var = 0.0;
    for (std::size_t c = 0; c < in_src; ++c) {
      double sum = 0.0, sq = 0.0;
      for (std::size_t o = 0; o < out_ch; ++o) {
        for (std::size_t k = 0; k < kk; ++k) sum += w.values()[(o * in_src + c) * kk + k];
      }
      const double n = static_cast<double>(out_ch * kk);
      const double mean = sum / n;
      for (std::size_t o = 0; o < out_ch; ++o) {
        for (std::size_t k = 0; k < kk; ++k) {
          const double d = w.values()[(o * in_src + c) * kk + k] - mean;
          sq += d * d;
        }
      }
      pooled_var += n > 1.0 ? sq / (n - 1.0) : 0.0;
    }
    const double sigma = std::sqrt(pooled_var / static_cast<double>(in_src));

    Rng rng(spec.seed);
    for (std::size_t j = 0; j < in_dst; ++j) {
      if (const auto c = exact_source(source_wl, spec.target_bands[j].center_wavelength_nm)) {
        copy_channel(*c, j, 1.0f);
        continue;
      }
      for (std::size_t o = 0; o < out_ch; ++o) {
        float* to = values.data() + (o * in_dst + j) * kk;
        for (std::size_t k = 0; k < kk; ++k) to[k] = static_cast<float>(rng.normal(0.0, sigma));
      }
    }
  } else {
    const auto sources = replication_sources(source_wl, spec.target_bands, spec.strategy);
    std::array<std::size_t, 3> multiplicity{};
    for (auto s : sources) ++multiplicity[s];
    for (std::size_t j = 0; j < in_dst; ++j) {
      const float divisor = spec.scale == ScaleMode::DivideByMultiplicity
                                ? static_cast<float>(multiplicity[sources[j]])
                                : 1.0f;
      copy_channel(sources[j], j, divisor);
    }
  }

  std::vector<float> target_wl;
  for (const auto& b : spec.target_bands) target_wl.push_back(static_cast<float>(b.center_wavelength_nm));
  return WeightTensor({w.out_channels(), static_cast<std::uint32_t>(in_dst), w.shape()[2], w.shape()[3]},
                      std::move(values), std::move(target_wl));
}

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'W', 'T', 'N', 'S'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeF32 = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::CorruptTensorFile, what);
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    if (bytes_.size() - pos_ < 4) corrupt("unexpected end of tensor file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + static_cast<std::size_t>(i)]} << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_tensor(const WeightTensor& w) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.reserve(36 + 4 * (w.wavelengths().size() + w.values().size()));
  put_u32(out, kVersion);
  put_u32(out, 4);
  for (auto d : w.shape()) put_u32(out, d);
  put_u32(out, kDtypeF32);
  put_u32(out, static_cast<std::uint32_t>(w.wavelengths().size()));
  for (float v : w.wavelengths()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  for (float v : w.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

WeightTensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    corrupt("bad magic");
  Cursor cur(bytes.subspan(4));
  if (cur.u32() != kVersion) corrupt("unsupported version");
  if (cur.u32() != 4) corrupt("ndim must be 4");
  std::array<std::uint32_t, 4> shape{};
  std::uint64_t count = 1;
  for (auto& d : shape) {
    d = cur.u32();
    if (d == 0) corrupt("zero dimension");
    count *= d;
  }
  if (cur.u32() != kDtypeF32) corrupt("unsupported dtype");
  const std::uint32_t n_wl = cur.u32();
  if (n_wl != 0 && n_wl != shape[1]) corrupt("wavelength count does not match input channels");
  if (cur.remaining() != 4 * (std::uint64_t{n_wl} + count)) corrupt("payload length mismatch");
  std::vector<float> wl(n_wl);
  for (auto& v : wl) v = cur.f32();
  std::vector<float> values(count);
  for (auto& v : values) v = cur.f32();
  return WeightTensor(shape, std::move(values), std::move(wl));
}

void write_tensor(const WeightTensor& w, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(w);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

WeightTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return decode_tensor(bytes);
}

}  // namespace spectra
