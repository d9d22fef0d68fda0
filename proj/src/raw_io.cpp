// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/raw_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <regex>
#include <iterator>

#include "rgbw/error.hpp"

namespace rgbw {
namespace {

constexpr std::uint64_t kMaxSamples = 1ull << 30;

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kTruncated, "RMSC1 stream truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_levels(const QuantLevels& levels) {
  if (levels.bit_depth < 8 || levels.bit_depth > 16) {
    throw Error(ErrorCode::kLevelRange, "bit depth must lie in [8,16]");
  }
  const int max_code = (1 << levels.bit_depth) - 1;
  if (levels.black < 0 || levels.black >= levels.white || levels.white > max_code) {
    throw Error(ErrorCode::kLevelRange,
                "levels must satisfy 0 <= black < white <= 2^depth-1, got black=" +
                    std::to_string(levels.black) + " white=" + std::to_string(levels.white));
  }
}

void check_dims(long long w, long long h) {
  if (w <= 0 || h <= 0 || w > 0xffffffffLL || h > 0xffffffffLL ||
      static_cast<std::uint64_t>(w) * static_cast<std::uint64_t>(h) > kMaxSamples) {
    throw Error(ErrorCode::kDimensionOverflow,
                "unsupported dimensions " + std::to_string(w) + "x" + std::to_string(h));
  }
}

}  // namespace

std::uint16_t quantize(double v, int black, int white) {
  const double code = std::floor(black + v * (white - black) + 0.5);
  return static_cast<std::uint16_t>(std::clamp(code, static_cast<double>(black),
                                               static_cast<double>(white)));
}

double dequantize(std::uint16_t sample, int black, int white) {
  return std::clamp((static_cast<double>(sample) - black) / (white - black), 0.0, 1.0);
}

Bytes write_raw(const RawImage& img, const QuantLevels& levels) {
  check_levels(levels);
  check_dims(img.width, img.height);
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw Error(ErrorCode::kDimensionMismatch, "raw data length disagrees with dimensions");
  }
  if (img.cfa.name.empty() || img.cfa.name.size() > 0xffff) {
    throw Error(ErrorCode::kInvalidArgument, "CFA name must be non-empty");
  }
  Bytes out(std::begin(kRmscMagic), std::end(kRmscMagic));
  out.reserve(24 + img.cfa.name.size() + img.data.size() * 2);
  put_u32(out, static_cast<std::uint32_t>(img.width));
  put_u32(out, static_cast<std::uint32_t>(img.height));
  put_u16(out, static_cast<std::uint16_t>(levels.bit_depth));
  put_u16(out, static_cast<std::uint16_t>(levels.black));
  put_u16(out, static_cast<std::uint16_t>(levels.white));
  put_u16(out, static_cast<std::uint16_t>(img.cfa.name.size()));
  for (char ch : img.cfa.name) out.push_back(static_cast<std::uint8_t>(ch));
  for (double v : img.data) put_u16(out, quantize(v, levels.black, levels.white));
  return out;
}

RawImage read_raw(std::span<const std::uint8_t> bytes, const CfaRegistry& registry) {
  if (bytes.size() < sizeof(kRmscMagic) ||
      std::memcmp(bytes.data(), kRmscMagic, sizeof(kRmscMagic)) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an RMSC1 stream");
  }
  Reader in(bytes.subspan(sizeof(kRmscMagic)));
  const std::uint32_t width = in.u32();
  const std::uint32_t height = in.u32();
  QuantLevels levels;
  levels.bit_depth = in.u16();
  levels.black = in.u16();
  levels.white = in.u16();
  check_levels(levels);
  check_dims(width, height);
  const std::uint16_t name_len = in.u16();
  const auto name_bytes = in.take(name_len);
  const std::string name(name_bytes.begin(), name_bytes.end());
  const CfaDescriptor& cfa = registry.find(name);

  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (in.remaining() < count * 2) {
    throw Error(ErrorCode::kTruncated, "RMSC1 payload holds " +
                                           std::to_string(in.remaining() / 2) + " of " +
                                           std::to_string(count) + " samples");
  }
  RawImage img(static_cast<int>(width), static_cast<int>(height), cfa);
  img.black_level = levels.black;
  img.white_level = levels.white;
  for (std::size_t i = 0; i < count; ++i) {
    img.data[i] = dequantize(in.u16(), levels.black, levels.white);
  }
  return img;
}

namespace {

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_from_span(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->bytes.size() - state->pos < length) png_error(png, "truncated PNG");
  std::memcpy(data, state->bytes.data() + state->pos, length);
  state->pos += length;
}

}  // namespace

Bytes write_rgb_png(const PlanarImage& rgb) {
  const auto& r = rgb.plane(Channel::R);
  const auto& g = rgb.plane(Channel::G);
  const auto& b = rgb.plane(Channel::B);
  check_dims(rgb.width, rgb.height);
  std::vector<png_byte> pixels(rgb.pixel_count() * 3);
  for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
    const double v[3] = {r[i], g[i], b[i]};
    for (int c = 0; c < 3; ++c) {
      if (!(v[c] >= 0.0 && v[c] <= 1.0)) {
        throw Error(ErrorCode::kOutOfRange, "RGB value outside [0,1] at pixel " +
                                                std::to_string(i));
      }
      pixels[i * 3 + c] = static_cast<png_byte>(std::floor(v[c] * 255.0 + 0.5));
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(rgb.height));
  for (int y = 0; y < rgb.height; ++y) {
    rows[static_cast<std::size_t>(y)] = pixels.data() + static_cast<std::size_t>(y) * rgb.width * 3;
  }

  Bytes out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::kIo, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(rgb.width),
               static_cast<png_uint_32>(rgb.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

PlanarImage read_rgb_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a PNG stream");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::kIo, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  PngReadState state{bytes, 0};
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  bool supported = true;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIo, "PNG decoding failed");
  }
  png_set_read_fn(png, &state, png_read_from_span);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_RGB || png_get_bit_depth(png, info) != 8 ||
      png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
    supported = false;
  } else {
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
      rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * 3;
    }
    png_read_image(png, rows.data());
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!supported) {
    throw Error(ErrorCode::kInvalidArgument, "only 8-bit non-interlaced RGB PNG is supported");
  }
  PlanarImage out = make_rgb(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) out.planes[c][i] = pixels[i * 3 + c] / 255.0;
  }
  return out;
}

Bytes write_pgm16(const Pgm16& img) {
  check_dims(img.width, img.height);
  if (img.samples.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw Error(ErrorCode::kDimensionMismatch, "PGM sample count disagrees with dimensions");
  }
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n65535\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + img.samples.size() * 2);
  for (std::uint16_t s : img.samples) {
    out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s & 0xff));
  }
  return out;
}

Pgm16 read_pgm16(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> long long {
    skip_space();
    long long v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    if (pos == start) throw Error(ErrorCode::kTruncated, "malformed PGM header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::kBadMagic, "not a binary PGM stream");
  }
  pos = 2;
  Pgm16 img;
  const long long w = number();
  const long long h = number();
  const long long maxval = number();
  check_dims(w, h);
  if (maxval != 65535) {
    throw Error(ErrorCode::kInvalidArgument, "only 16-bit PGM (maxval 65535) is supported");
  }
  ++pos;  // single whitespace before raster
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (bytes.size() < pos || bytes.size() - pos < count * 2) {
    throw Error(ErrorCode::kTruncated, "PGM raster truncated");
  }
  img.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    img.samples[i] =
        static_cast<std::uint16_t>((bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1]);
  }
  return img;
}

RawImage raw_from_pgm16(const Pgm16& pgm, CfaDescriptor cfa, int black, int white) {
  if (black < 0 || black >= white || white > 65535) {
    throw Error(ErrorCode::kLevelRange, "invalid levels for PGM import");
  }
  RawImage img(pgm.width, pgm.height, std::move(cfa));
  img.black_level = black;
  img.white_level = white;
  for (std::size_t i = 0; i < pgm.samples.size(); ++i) {
    img.data[i] = dequantize(pgm.samples[i], black, white);
  }
  return img;
}

Pgm16 pgm16_from_raw(const RawImage& raw, int black, int white) {
  if (black < 0 || black >= white || white > 65535) {
    throw Error(ErrorCode::kLevelRange, "invalid levels for PGM export");
  }
  Pgm16 pgm{raw.width, raw.height, {}};
  pgm.samples.reserve(raw.data.size());
  for (double v : raw.data) pgm.samples.push_back(quantize(v, black, white));
  return pgm;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

RawImage load_raw(const std::filesystem::path& path, const CfaRegistry& registry) {
  const Bytes bytes = read_file(path);
  return read_raw(bytes, registry);
}

void save_raw(const std::filesystem::path& path, const RawImage& img,
              const QuantLevels& levels) {
  write_file(path, write_raw(img, levels));
}

std::filesystem::path input_path(const std::filesystem::path& root, const std::string& split,
                                 const std::string& scene, int gain_db) {
  return root / split / (scene + "_" + std::to_string(gain_db) + "dB.rmsc");
}

std::filesystem::path gt_path(const std::filesystem::path& root, const std::string& split,
                              const std::string& scene) {
  return root / split / (scene + "_gt.rmsc");
}

std::optional<DatasetFileName> parse_dataset_filename(const std::string& filename) {
  static const std::regex input_re(R"(^([A-Za-z0-9][A-Za-z0-9_\-]*)_([0-9]+)dB\.rmsc$)");
  static const std::regex gt_re(R"(^([A-Za-z0-9][A-Za-z0-9_\-]*)_gt\.rmsc$)");
  std::smatch m;
  if (std::regex_match(filename, m, gt_re)) return DatasetFileName{m[1].str(), std::nullopt};
  if (std::regex_match(filename, m, input_re)) {
    if (m[2].str().size() > 4) return std::nullopt;
    return DatasetFileName{m[1].str(), std::stoi(m[2].str())};
  }
  return std::nullopt;
}

}  // namespace rgbw
