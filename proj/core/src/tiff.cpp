#include "spectra/tiff.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include "spectra/error.hpp"

namespace spectra::tiff {
namespace {

enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kPredictor = 317,
  kTileWidth = 322,
  kTileLength = 323,
  kTileOffsets = 324,
  kTileByteCounts = 325,
  kExtraSamples = 338,
  kSampleFormat = 339,
  kModelPixelScale = 33550,
};

enum FieldType : std::uint16_t {
  kByte = 1,
  kAscii = 2,
  kShort = 3,
  kLong = 4,
  kRational = 5,
  kSByte = 6,
  kUndefined = 7,
  kSShort = 8,
  kSLong = 9,
  kSRational = 10,
  kFloat = 11,
  kDouble = 12,
};

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptRaster, what); }
[[noreturn]] void unsupported(const std::string& what) {
  throw Error(ErrorCode::UnsupportedFormat, what);
}

std::size_t type_size(std::uint16_t type) {
  switch (type) {
    case kByte: case kAscii: case kSByte: case kUndefined: return 1;
    case kShort: case kSShort: return 2;
    case kLong: case kSLong: case kFloat: return 4;
    case kRational: case kSRational: case kDouble: return 8;
    default: return 0;
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
    if (bytes_.size() < 8) corrupt("file shorter than TIFF header");
    if (bytes_[0] == 'I' && bytes_[1] == 'I') {
      big_endian_ = false;
    } else if (bytes_[0] == 'M' && bytes_[1] == 'M') {
      big_endian_ = true;
    } else {
      unsupported("missing TIFF byte-order mark");
    }
    const auto magic = u16(2);
    if (magic == 43) unsupported("BigTIFF is not supported");
    if (magic != 42) unsupported("bad TIFF magic number");
  }

  bool big_endian() const noexcept { return big_endian_; }
  std::size_t size() const noexcept { return bytes_.size(); }

  void need(std::size_t offset, std::size_t len) const {
    if (offset > bytes_.size() || len > bytes_.size() - offset) corrupt("read past end of file");
  }

  std::uint16_t u16(std::size_t off) const {
    need(off, 2);
    const auto a = bytes_[off], b = bytes_[off + 1];
    return big_endian_ ? static_cast<std::uint16_t>((a << 8) | b)
                       : static_cast<std::uint16_t>((b << 8) | a);
  }

  std::uint32_t u32(std::size_t off) const {
    need(off, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint32_t byte = bytes_[off + static_cast<std::size_t>(i)];
      v |= big_endian_ ? byte << (8 * (3 - i)) : byte << (8 * i);
    }
    return v;
  }

  std::uint64_t u64(std::size_t off) const {
    const std::uint64_t a = u32(off), b = u32(off + 4);
    return big_endian_ ? (a << 32) | b : (b << 32) | a;
  }

  std::span<const std::uint8_t> slice(std::size_t off, std::size_t len) const {
    need(off, len);
    return bytes_.subspan(off, len);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  bool big_endian_ = false;
};

struct Entry {
  std::uint16_t type = 0;
  std::uint32_t count = 0;
  std::size_t value_offset = 0;  // where the value bytes live
};

using Directory = std::map<std::uint16_t, Entry>;

Directory read_directory(const Reader& r) {
  const std::size_t ifd = r.u32(4);
  const std::size_t n = r.u16(ifd);
  r.need(ifd + 2, n * 12);
  Directory dir;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t at = ifd + 2 + i * 12;
    Entry e;
    const auto tag = r.u16(at);
    e.type = r.u16(at + 2);
    e.count = r.u32(at + 4);
    const auto width = type_size(e.type);
    if (width == 0) continue;  // unknown field types are skipped
    const auto total = static_cast<std::uint64_t>(width) * e.count;
    e.value_offset = total <= 4 ? at + 8 : r.u32(at + 8);
    if (total > r.size()) corrupt("tag " + std::to_string(tag) + " count exceeds file size");
    r.need(e.value_offset, static_cast<std::size_t>(total));
    dir.emplace(tag, e);
  }
  return dir;
}

std::vector<std::uint64_t> integers(const Reader& r, const Entry& e) {
  std::vector<std::uint64_t> out;
  out.reserve(e.count);
  for (std::size_t i = 0; i < e.count; ++i) {
    switch (e.type) {
      case kByte: case kUndefined: out.push_back(r.slice(e.value_offset + i, 1)[0]); break;
      case kShort: out.push_back(r.u16(e.value_offset + 2 * i)); break;
      case kLong: out.push_back(r.u32(e.value_offset + 4 * i)); break;
      default: unsupported("unexpected field type for integer tag");
    }
  }
  return out;
}

std::vector<double> doubles(const Reader& r, const Entry& e) {
  std::vector<double> out;
  for (std::size_t i = 0; i < e.count; ++i) {
    if (e.type == kDouble) {
      out.push_back(std::bit_cast<double>(r.u64(e.value_offset + 8 * i)));
    } else if (e.type == kFloat) {
      out.push_back(std::bit_cast<float>(r.u32(e.value_offset + 4 * i)));
    } else {
      return {};
    }
  }
  return out;
}

std::vector<std::uint64_t> required(const Reader& r, const Directory& dir, std::uint16_t tag,
                                    const char* name) {
  const auto it = dir.find(tag);
  if (it == dir.end()) unsupported(std::string("missing required tag ") + name);
  return integers(r, it->second);
}

std::uint64_t scalar_or(const Reader& r, const Directory& dir, std::uint16_t tag,
                        std::uint64_t fallback) {
  const auto it = dir.find(tag);
  if (it == dir.end()) return fallback;
  const auto v = integers(r, it->second);
  return v.empty() ? fallback : v.front();
}

struct Layout {
  Info info;
  std::size_t chunk_width = 0;   // tile width or image width
  std::size_t chunk_height = 0;  // tile length or rows per strip
  std::vector<std::uint64_t> offsets;
  std::vector<std::uint64_t> byte_counts;
};

Layout parse_layout(const Reader& r) {
  const auto dir = read_directory(r);
  Layout lay;
  Info& info = lay.info;
  info.width = required(r, dir, kImageWidth, "ImageWidth").at(0);
  info.height = required(r, dir, kImageLength, "ImageLength").at(0);
  if (info.width == 0 || info.height == 0) corrupt("zero image dimension");
  info.samples_per_pixel = scalar_or(r, dir, kSamplesPerPixel, 1);
  if (info.samples_per_pixel < 1 || info.samples_per_pixel > 16)
    unsupported("samples per pixel must be 1..16, got " + std::to_string(info.samples_per_pixel));

  auto bits = dir.count(kBitsPerSample) ? integers(r, dir.at(kBitsPerSample))
                                        : std::vector<std::uint64_t>{1};
  if (bits.size() == 1) bits.resize(info.samples_per_pixel, bits.front());
  if (bits.size() != info.samples_per_pixel) corrupt("BitsPerSample count mismatch");
  if (!std::all_of(bits.begin(), bits.end(), [&](auto b) { return b == bits.front(); }))
    unsupported("mixed bits per sample");
  if (bits.front() != 8 && bits.front() != 16)
    unsupported("bits per sample must be 8 or 16, got " + std::to_string(bits.front()));
  info.bits_per_sample = static_cast<int>(bits.front());

  if (dir.count(kSampleFormat)) {
    for (auto f : integers(r, dir.at(kSampleFormat)))
      if (f != 1) unsupported("only unsigned integer samples are supported");
  }

  info.compression = static_cast<int>(scalar_or(r, dir, kCompression, 1));
  if (info.compression != 1 && info.compression != 8 && info.compression != 32946)
    unsupported("compression scheme " + std::to_string(info.compression));
  info.predictor = static_cast<int>(scalar_or(r, dir, kPredictor, 1));
  if (info.predictor != 1 && info.predictor != 2)
    unsupported("predictor " + std::to_string(info.predictor));
  const auto planar = scalar_or(r, dir, kPlanarConfig, 1);
  if (planar != 1 && planar != 2) unsupported("planar configuration " + std::to_string(planar));
  info.planar = planar == 2 && info.samples_per_pixel > 1;

  if (const auto it = dir.find(kModelPixelScale); it != dir.end()) {
    const auto v = doubles(r, it->second);
    if (v.size() >= 2 && v[0] > 0.0 && v[1] > 0.0) info.pixel_scale = std::array{v[0], v[1]};
  }

  info.tiled = dir.count(kTileOffsets) > 0;
  if (info.tiled) {
    lay.chunk_width = required(r, dir, kTileWidth, "TileWidth").at(0);
    lay.chunk_height = required(r, dir, kTileLength, "TileLength").at(0);
    if (lay.chunk_width == 0 || lay.chunk_height == 0) corrupt("zero tile size");
    lay.offsets = integers(r, dir.at(kTileOffsets));
    lay.byte_counts = required(r, dir, kTileByteCounts, "TileByteCounts");
  } else {
    lay.chunk_width = info.width;
    lay.chunk_height = std::min<std::uint64_t>(scalar_or(r, dir, kRowsPerStrip, info.height),
                                               info.height);
    if (lay.chunk_height == 0) corrupt("zero rows per strip");
    lay.offsets = required(r, dir, kStripOffsets, "StripOffsets");
    lay.byte_counts = required(r, dir, kStripByteCounts, "StripByteCounts");
  }

  const std::size_t across = (info.width + lay.chunk_width - 1) / lay.chunk_width;
  const std::size_t down = (info.height + lay.chunk_height - 1) / lay.chunk_height;
  const std::size_t expected = across * down * (info.planar ? info.samples_per_pixel : 1);
  if (lay.offsets.size() != expected || lay.byte_counts.size() != expected)
    corrupt("expected " + std::to_string(expected) + " data chunks, found " +
            std::to_string(lay.offsets.size()));
  return lay;
}

std::vector<std::uint8_t> inflate_chunk(std::span<const std::uint8_t> src, std::size_t expected) {
  std::vector<std::uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw Error(ErrorCode::Io, "zlib initialisation failed");
  zs.next_in = const_cast<Bytef*>(src.data());
  zs.avail_in = static_cast<uInt>(src.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = Z_OK;
  while (rc == Z_OK && zs.avail_out > 0) rc = inflate(&zs, Z_NO_FLUSH);
  const auto produced = out.size() - zs.avail_out;
  inflateEnd(&zs);
  if (rc != Z_OK && rc != Z_STREAM_END && !(rc == Z_BUF_ERROR && produced == expected))
    corrupt("deflate stream error");
  if (produced < expected) corrupt("deflate stream shorter than chunk");
  return out;
}

}  // namespace

Raster decode(std::span<const std::uint8_t> bytes) {
  const Reader r(bytes);
  const Layout lay = parse_layout(r);
  const Info& info = lay.info;
  const std::size_t spp = info.samples_per_pixel;
  const std::size_t bps = static_cast<std::size_t>(info.bits_per_sample) / 8;
  const std::size_t samples_per_chunk_px = info.planar ? 1 : spp;
  const std::size_t across = (info.width + lay.chunk_width - 1) / lay.chunk_width;
  const std::size_t down = (info.height + lay.chunk_height - 1) / lay.chunk_height;
  const std::size_t chunk_row_bytes = lay.chunk_width * samples_per_chunk_px * bps;

  Raster out;
  out.info = info;
  out.planes.assign(info.width * info.height * spp, 0);

  std::vector<std::uint16_t> decoded;
  for (std::size_t c = 0; c < lay.offsets.size(); ++c) {
    const std::size_t plane = info.planar ? c / (across * down) : 0;
    const std::size_t idx = c % (across * down);
    const std::size_t cx = idx % across, cy = idx / across;
    const std::size_t row0 = cy * lay.chunk_height;
    const std::size_t col0 = cx * lay.chunk_width;
    // Tiles are always full-size in the file; the last strip may be short.
    const std::size_t rows =
        info.tiled ? lay.chunk_height : std::min(lay.chunk_height, info.height - row0);
    const std::size_t needed = rows * chunk_row_bytes;

    const auto src = r.slice(lay.offsets[c], lay.byte_counts[c]);
    std::vector<std::uint8_t> raw;
    if (info.compression == 1) {
      if (src.size() < needed) corrupt("data chunk " + std::to_string(c) + " truncated");
      raw.assign(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(needed));
    } else {
      raw = inflate_chunk(src, needed);
    }

    decoded.resize(rows * lay.chunk_width * samples_per_chunk_px);
    for (std::size_t i = 0; i < decoded.size(); ++i) {
      if (bps == 1) {
        decoded[i] = raw[i];
      } else {
        const std::uint16_t a = raw[2 * i], b = raw[2 * i + 1];
        decoded[i] = r.big_endian() ? static_cast<std::uint16_t>((a << 8) | b)
                                    : static_cast<std::uint16_t>((b << 8) | a);
      }
    }
    if (info.predictor == 2) {
      const std::size_t stride = samples_per_chunk_px;
      const std::uint32_t mask = bps == 1 ? 0xFFu : 0xFFFFu;
      for (std::size_t y = 0; y < rows; ++y) {
        auto* row = decoded.data() + y * lay.chunk_width * stride;
        for (std::size_t i = stride; i < lay.chunk_width * stride; ++i)
          row[i] = static_cast<std::uint16_t>((row[i] + row[i - stride]) & mask);
      }
    }

    const std::size_t valid_rows = std::min(rows, info.height - row0);
    const std::size_t valid_cols = std::min(lay.chunk_width, info.width - col0);
    for (std::size_t y = 0; y < valid_rows; ++y) {
      for (std::size_t x = 0; x < valid_cols; ++x) {
        const std::size_t src_px = (y * lay.chunk_width + x) * samples_per_chunk_px;
        const std::size_t dst_px = (row0 + y) * info.width + col0 + x;
        if (info.planar) {
          out.planes[plane * info.width * info.height + dst_px] = decoded[src_px];
        } else {
          for (std::size_t s = 0; s < spp; ++s)
            out.planes[s * info.width * info.height + dst_px] = decoded[src_px + s];
        }
      }
    }
  }
  return out;
}

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Info read_info(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return parse_layout(Reader(bytes)).info;
}

Raster read(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return decode(bytes);
}

namespace {

class LittleEndianWriter {
 public:
  void u16(std::uint16_t v) {
    buf.push_back(static_cast<std::uint8_t>(v));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    u32(static_cast<std::uint32_t>(bits));
    u32(static_cast<std::uint32_t>(bits >> 32));
  }
  void patch_u32(std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  std::vector<std::uint8_t> buf;
};

}  // namespace

void write(const std::filesystem::path& path, std::size_t width, std::size_t height,
           std::size_t samples, int bits, std::span<const std::uint16_t> planes,
           std::optional<std::array<double, 2>> pixel_scale) {
  if (width == 0 || height == 0 || samples == 0 || samples > 16)
    throw Error(ErrorCode::InvalidArgument, "bad raster shape for TIFF output");
  if (bits != 8 && bits != 16) throw Error(ErrorCode::InvalidArgument, "TIFF output supports 8 or 16 bits");
  if (planes.size() != width * height * samples)
    throw Error(ErrorCode::InvalidArgument, "pixel buffer size does not match shape");

  const std::size_t bps = static_cast<std::size_t>(bits) / 8;
  const std::size_t row_bytes = width * samples * bps;
  const std::size_t rows_per_strip = std::max<std::size_t>(1, (64 * 1024) / row_bytes);
  const std::size_t strips = (height + rows_per_strip - 1) / rows_per_strip;

  LittleEndianWriter w;
  w.buf = {'I', 'I'};
  w.u16(42);
  w.u32(8);

  struct Field {
    std::uint16_t tag, type;
    std::vector<std::uint32_t> ints;
    std::vector<double> reals;
  };
  std::vector<Field> fields;
  const auto u = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
  fields.push_back({kImageWidth, kLong, {u(width)}, {}});
  fields.push_back({kImageLength, kLong, {u(height)}, {}});
  fields.push_back({kBitsPerSample, kShort, std::vector<std::uint32_t>(samples, u(bits)), {}});
  fields.push_back({kCompression, kShort, {1}, {}});
  fields.push_back({kPhotometric, kShort, {samples == 3 ? 2u : 1u}, {}});
  fields.push_back({kStripOffsets, kLong, std::vector<std::uint32_t>(strips, 0), {}});
  fields.push_back({kSamplesPerPixel, kShort, {u(samples)}, {}});
  fields.push_back({kRowsPerStrip, kLong, {u(rows_per_strip)}, {}});
  std::vector<std::uint32_t> counts;
  for (std::size_t s = 0; s < strips; ++s)
    counts.push_back(u(std::min(rows_per_strip, height - s * rows_per_strip) * row_bytes));
  fields.push_back({kStripByteCounts, kLong, counts, {}});
  fields.push_back({kPlanarConfig, kShort, {1}, {}});
  const std::size_t extra = samples == 3 ? 0 : samples - 1;
  if (extra > 0) fields.push_back({kExtraSamples, kShort, std::vector<std::uint32_t>(extra, 0), {}});
  fields.push_back({kSampleFormat, kShort, std::vector<std::uint32_t>(samples, 1), {}});
  if (pixel_scale) fields.push_back({kModelPixelScale, kDouble, {}, {(*pixel_scale)[0], (*pixel_scale)[1], 0.0}});

  // IFD at offset 8, out-of-line values after it, then pixel data.
  const std::size_t ifd_size = 2 + fields.size() * 12 + 4;
  std::size_t cursor = 8 + ifd_size;
  std::vector<std::size_t> value_at(fields.size(), 0);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& f = fields[i];
    const std::size_t bytes = f.type == kDouble ? 8 * f.reals.size() : type_size(f.type) * f.ints.size();
    if (bytes > 4) {
      cursor += cursor % 2;
      value_at[i] = cursor;
      cursor += bytes;
    }
  }
  cursor += cursor % 2;
  const std::size_t data_start = cursor;
  for (std::size_t s = 0; s < strips; ++s) fields[5].ints[s] = u(data_start + s * rows_per_strip * row_bytes);

  w.u16(static_cast<std::uint16_t>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& f = fields[i];
    w.u16(f.tag);
    w.u16(f.type);
    w.u32(u(f.type == kDouble ? f.reals.size() : f.ints.size()));
    if (value_at[i] != 0) {
      w.u32(u(value_at[i]));
    } else if (f.type == kShort) {
      w.u16(static_cast<std::uint16_t>(f.ints[0]));
      w.u16(f.ints.size() > 1 ? static_cast<std::uint16_t>(f.ints[1]) : 0);
    } else {
      w.u32(f.ints[0]);
    }
  }
  w.u32(0);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (value_at[i] == 0) continue;
    w.buf.resize(value_at[i], 0);
    const auto& f = fields[i];
    for (auto v : f.ints) f.type == kShort ? w.u16(static_cast<std::uint16_t>(v)) : w.u32(v);
    for (auto v : f.reals) w.f64(v);
  }
  w.buf.resize(data_start, 0);

  const std::size_t plane = width * height;
  for (std::size_t px = 0; px < plane; ++px) {
    for (std::size_t s = 0; s < samples; ++s) {
      const auto v = planes[s * plane + px];
      if (bps == 1) {
        if (v > 0xFF) throw Error(ErrorCode::InvalidArgument, "sample exceeds 8-bit range");
        w.buf.push_back(static_cast<std::uint8_t>(v));
      } else {
        w.u16(v);
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(w.buf.data()), static_cast<std::streamsize>(w.buf.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

}  // namespace spectra::tiff
