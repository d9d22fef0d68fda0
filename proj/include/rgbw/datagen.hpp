// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rgbw/image.hpp"
#include "rgbw/isp.hpp"

namespace rgbw {

/// Aligned training/evaluation pair at one gain.
struct PairSample {
  RawImage input_rgbw;
  RawImage gt_bayer;
  std::string scene_id;
  int gain_db = 0;
};

struct BinnedCapture {
  RawImage dbinb;  // half-resolution Bayer from the color diagonals
  Plane dbinc;     // half-resolution white from the W diagonals
};

/// Bayer tile induced by the anti-diagonal colors of each 2x2 sub-block.
/// Throws Error(kDescriptorShape) unless every 2x2 sub-block holds two W on
/// one diagonal and two equal colors on the other.
CfaDescriptor binned_bayer_descriptor(const CfaDescriptor& rgbw);

/// Averages same-channel samples along the diagonals of each 2x2 block.
BinnedCapture diagonal_bin(const RawImage& rgbw);

struct PairOptions {
  DemosaicKind demosaic = DemosaicKind::kMhc;
  CfaDescriptor input_cfa;   // empty name -> default RGBW tile
  CfaDescriptor output_cfa;  // empty name -> RGGB
  int threads = 1;
};

/// bin -> demosaic the binned Bayer -> attach binned white -> mosaic to the
/// RGBW input and the Bayer ground truth. The result is a 0 dB pair at half
/// the capture resolution.
PairSample generate_pair(const RawImage& capture, const PairOptions& options = {},
                         std::string scene_id = {});

/// Centered crop whose origin snaps down to a multiple of the tile size.
RawImage crop_center(const RawImage& img, int width, int height);

enum class SceneKind { kSlantedEdge, kTextGlyphs, kMesh, kColorRamp, kNoiseField };

std::string to_string(SceneKind kind);
/// Throws Error(kUnknownKind).
SceneKind parse_scene_kind(std::string_view name);
const std::vector<SceneKind>& all_scene_kinds();

inline constexpr double kSlantedEdgeDegrees = 5.0;

/// W synthesized from the color planes of synthetic scenes.
inline double synthesize_white(double r, double g, double b) {
  return 0.3 * r + 0.5 * g + 0.2 * b;
}

/// Deterministic scene with R, G, B and derived W planes, values in [0,1].
/// Throws Error(kInvalidArgument) below 32x32.
PlanarImage generate_synthetic_scene(SceneKind kind, int width, int height,
                                     std::uint64_t seed);

/// Horizontal edge location (in pixels, measured from x = 0) of the slanted
/// edge scene for row y; the scene value crosses the midpoint there.
double slanted_edge_position(int width, int height, int y);

}  // namespace rgbw
