// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rgbw/cfa.hpp"
#include "rgbw/datagen.hpp"
#include "rgbw/image.hpp"
#include "rgbw/raw_io.hpp"
#include "rgbw/ridge.hpp"

namespace rgbw {

/// Each output pixel copies the closest input sample of the target channel.
/// Distance is Euclidean; ties go to the smaller y, then the smaller x.
RawImage remosaic_nearest(const RawImage& rgbw, const CfaDescriptor& cfa_out, int threads = 1);

/// Dense white plane: W sites pass through, color sites take an edge-directed
/// mean of their four W neighbors. Borders mirror so neighbors stay on W sites.
/// Throws Error(kDescriptorShape) unless W forms a checkerboard.
Plane interpolate_white_plane(const RawImage& rgbw, int threads = 1);

/// Color-difference remosaic guided by the interpolated white plane.
RawImage remosaic_white_guided(const RawImage& rgbw, const CfaDescriptor& cfa_out,
                               int threads = 1);

struct PhaseFit {
  std::uint64_t samples = 0;
  SolveMethod method = SolveMethod::kCholesky;
  double residual = 0.0;
  double relative_residual = 0.0;
};

/// One linear kernel per input-tile phase, row-major over the tile.
struct FilterBank {
  int patch_radius = 2;
  CfaDescriptor cfa_in;
  CfaDescriptor cfa_out;
  double lambda = 1e-4;
  std::vector<std::vector<double>> weights;
  /// Filled by training only; not serialized.
  std::vector<PhaseFit> fits;

  int side() const { return 2 * patch_radius + 1; }
  int taps() const { return side() * side(); }
  int phases() const { return cfa_in.tile_width * cfa_in.tile_height; }
  int phase(int x, int y) const {
    return (y % cfa_in.tile_height) * cfa_in.tile_width + (x % cfa_in.tile_width);
  }
};

inline constexpr int kDefaultPatchRadius = 2;
inline constexpr double kDefaultLambda = 1e-4;

/// Bank whose kernels all hold `center` at the middle tap and zero elsewhere.
FilterBank make_center_tap_bank(const CfaDescriptor& cfa_in, const CfaDescriptor& cfa_out,
                                int radius, double center);

/// Normal equations of every phase, accumulated over the interior pixels of
/// all pairs in row-major order. Targets are the ground-truth Bayer values.
std::vector<NormalEquations> accumulate_normal_equations(std::span<const PairSample> pairs,
                                                         int patch_radius, int threads = 1);

/// Per-phase ridge regression from RGBW patches to ground-truth Bayer values.
FilterBank train_filter_bank(std::span<const PairSample> pairs,
                             int patch_radius = kDefaultPatchRadius,
                             double lambda = kDefaultLambda, int threads = 1);

/// Replicate-padded per-phase convolution, clamped to [0,1].
RawImage apply_filter_bank(const RawImage& rgbw, const FilterBank& bank, int threads = 1);

/// Text header followed by little-endian float64 taps, phases in row-major
/// tile order:
///
///   RGBWFB1
///   radius=<r>
///   cfa_in=<name>
///   cfa_out=<name>
///   lambda=<value>
///   phases=<n>
///   taps=<(2r+1)^2>
///   end
Bytes write_filter_bank(const FilterBank& bank);
FilterBank read_filter_bank(std::span<const std::uint8_t> bytes, const CfaRegistry& registry);

}  // namespace rgbw
