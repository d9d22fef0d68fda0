// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgbw/cfa.hpp"
#include "rgbw/image.hpp"

namespace rgbw {

using Bytes = std::vector<std::uint8_t>;

inline constexpr char kRmscMagic[8] = {'R', 'G', 'B', 'W', 'R', 'M', 'S', '1'};

struct QuantLevels {
  int bit_depth = 10;
  int black = 64;
  int white = 1023;
};

/// Round-half-up quantizer shared by every encoder.
std::uint16_t quantize(double v, int black, int white);
double dequantize(std::uint16_t sample, int black, int white);

/// RMSC1 container, little-endian:
///   magic[8] "RGBWRMS1"
///   u32 width, u32 height
///   u16 bit_depth, u16 black_level, u16 white_level
///   u16 cfa_name_length, char cfa_name[cfa_name_length]
///   u16 payload[width*height], row-major
Bytes write_raw(const RawImage& img, const QuantLevels& levels = {});
RawImage read_raw(std::span<const std::uint8_t> bytes, const CfaRegistry& registry);

/// 8-bit RGB PNG with round-half-up. Values outside [0,1] are rejected.
Bytes write_rgb_png(const PlanarImage& rgb);
/// Decodes an 8-bit RGB PNG back to [0,1] planes.
PlanarImage read_rgb_png(std::span<const std::uint8_t> bytes);

/// Binary PGM (P5) with maxval 65535, big-endian samples as the format requires.
struct Pgm16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> samples;
};
Bytes write_pgm16(const Pgm16& img);
Pgm16 read_pgm16(std::span<const std::uint8_t> bytes);

/// Imports a third-party plane: samples are interpreted with the given levels.
RawImage raw_from_pgm16(const Pgm16& pgm, CfaDescriptor cfa, int black, int white);
Pgm16 pgm16_from_raw(const RawImage& raw, int black, int white);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

RawImage load_raw(const std::filesystem::path& path,
                  const CfaRegistry& registry = CfaRegistry::with_defaults());
void save_raw(const std::filesystem::path& path, const RawImage& img,
              const QuantLevels& levels = {});

/// Dataset layout: <root>/<split>/<scene>_<gain>dB.rmsc for inputs and
/// <root>/<split>/<scene>_gt.rmsc for the clean ground-truth Bayer.
std::filesystem::path input_path(const std::filesystem::path& root,
                                 const std::string& split, const std::string& scene,
                                 int gain_db);
std::filesystem::path gt_path(const std::filesystem::path& root, const std::string& split,
                              const std::string& scene);

struct DatasetFileName {
  std::string scene;
  std::optional<int> gain_db;  // empty for ground truth files
};
/// Parses "<scene>_<gain>dB.rmsc" or "<scene>_gt.rmsc"; nullopt when malformed.
std::optional<DatasetFileName> parse_dataset_filename(const std::string& filename);

}  // namespace rgbw
