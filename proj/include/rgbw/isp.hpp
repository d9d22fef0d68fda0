// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "rgbw/image.hpp"

namespace rgbw {

enum class DemosaicKind { kBilinear, kMhc };
enum class Transfer { kSrgb, kGamma22, kLinear };

std::string to_string(DemosaicKind kind);
std::string to_string(Transfer transfer);
/// Throws Error(kUnknownKind).
DemosaicKind parse_demosaic_kind(std::string_view name);
Transfer parse_transfer(std::string_view name);

/// Rendering chain applied to predicted and ground-truth Bayer alike.
struct IspConfig {
  DemosaicKind demosaic = DemosaicKind::kMhc;
  std::array<double, 3> wb_gains{1.0, 1.0, 1.0};
  Transfer transfer = Transfer::kSrgb;

  bool operator==(const IspConfig&) const = default;
};

/// Throws Error(kInvalidArgument) when a white-balance gain is not positive.
void validate(const IspConfig& cfg);

/// Bilinear demosaic with mirror (reflect-101) borders. Known samples pass
/// through.
PlanarImage demosaic_bilinear(const RawImage& bayer, int threads = 1);

/// 5x5 gradient-corrected linear demosaic (Malvar, He and Cutler). Output is
/// not clamped; the kernels overshoot on sharp edges.
PlanarImage demosaic_mhc(const RawImage& bayer, int threads = 1);

PlanarImage demosaic(const RawImage& bayer, DemosaicKind kind, int threads = 1);

double transfer_value(double v, Transfer transfer);
PlanarImage apply_transfer(const PlanarImage& rgb, Transfer transfer);

/// demosaic -> white balance -> clamp [0,1] -> transfer.
PlanarImage run_isp(const RawImage& bayer, const IspConfig& cfg, int threads = 1);

}  // namespace rgbw
