// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rgbw/image.hpp"

namespace rgbw {

inline constexpr std::string_view kDefaultRgbwName = "rgbw4x4";

/// The reference 4x4 RGBW tile:
///
///   W R W G
///   R W G W
///   W G W B
///   G W B W
///
/// Every 2x2 sub-block carries W on its main diagonal and one color on the
/// anti-diagonal; the sub-block colors read as an RGGB Bayer.
CfaDescriptor make_rgbw_default();

/// Bayer tile from a four-letter phase ("RGGB", "GRBG", "GBRG", "BGGR").
CfaDescriptor make_bayer(std::string_view phase);

/// Builds a descriptor from rows of channel letters, e.g. {"WR", "RW"}.
/// Throws Error(kInvalidArgument) on unknown letters or ragged rows.
CfaDescriptor make_cfa(std::string name, const std::vector<std::string>& rows);

Channel channel_at(const CfaDescriptor& cfa, int x, int y);

struct DescriptorReport {
  bool pass = true;
  bool bayer = false;
  bool rgbw = false;
  std::vector<std::string> violations;
};

DescriptorReport validate_descriptor(const CfaDescriptor& cfa);

/// True when the W sites of the tile form a perfect checkerboard.
bool white_is_quincunx(const CfaDescriptor& cfa);

/// Samples each pixel from the plane named by the CFA at that position.
RawImage mosaic(const PlanarImage& src, const CfaDescriptor& cfa);

/// Splits an RGBW raw into four sparse planes ordered (W, G, B, R); each plane
/// holds the raw value on its own sites and zero elsewhere.
PlanarImage expand_cfa_channels(const RawImage& raw);

/// Name -> descriptor lookup used when decoding files.
class CfaRegistry {
 public:
  /// Registry holding the default RGBW tile and the four Bayer phases.
  static CfaRegistry with_defaults();

  void add(CfaDescriptor cfa);
  /// Throws Error(kUnknownCfa).
  const CfaDescriptor& find(const std::string& name) const;
  bool contains(const std::string& name) const;

 private:
  std::map<std::string, CfaDescriptor> entries_;
};

}  // namespace rgbw
