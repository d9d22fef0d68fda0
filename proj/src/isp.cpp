// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/isp.hpp"

#include <algorithm>
#include <cmath>

#include "rgbw/error.hpp"
#include "rgbw/parallel.hpp"

namespace rgbw {
namespace {

int mirror(int i, int n) {
  // reflect-101; callers guarantee n >= 3 and |overshoot| <= 2
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

void check_bayer(const RawImage& bayer) {
  if (!bayer.cfa.is_bayer()) {
    throw Error(ErrorCode::kDescriptorMismatch, "demosaic needs a Bayer descriptor, got " +
                                                    bayer.cfa.name);
  }
  if (bayer.width < 3 || bayer.height < 3) {
    throw Error(ErrorCode::kInvalidArgument, "demosaic needs at least 3x3 pixels");
  }
}

std::size_t plane_index(Channel c) {
  switch (c) {
    case Channel::R: return 0;
    case Channel::G: return 1;
    case Channel::B: return 2;
    default: return 3;
  }
}

struct Kernel5 {
  double k[5][5];
};

// Malvar-He-Cutler coefficients, already divided by 8.
constexpr Kernel5 kGreenAtRb{{{0, 0, -1 / 8.0, 0, 0},
                              {0, 0, 2 / 8.0, 0, 0},
                              {-1 / 8.0, 2 / 8.0, 4 / 8.0, 2 / 8.0, -1 / 8.0},
                              {0, 0, 2 / 8.0, 0, 0},
                              {0, 0, -1 / 8.0, 0, 0}}};
// Missing color whose samples sit left and right of the green site.
constexpr Kernel5 kColorAtGreenRow{{{0, 0, 0.5 / 8.0, 0, 0},
                                    {0, -1 / 8.0, 0, -1 / 8.0, 0},
                                    {-1 / 8.0, 4 / 8.0, 5 / 8.0, 4 / 8.0, -1 / 8.0},
                                    {0, -1 / 8.0, 0, -1 / 8.0, 0},
                                    {0, 0, 0.5 / 8.0, 0, 0}}};
// Missing color whose samples sit above and below the green site.
constexpr Kernel5 kColorAtGreenCol{{{0, 0, -1 / 8.0, 0, 0},
                                    {0, -1 / 8.0, 4 / 8.0, -1 / 8.0, 0},
                                    {0.5 / 8.0, 0, 5 / 8.0, 0, 0.5 / 8.0},
                                    {0, -1 / 8.0, 4 / 8.0, -1 / 8.0, 0},
                                    {0, 0, -1 / 8.0, 0, 0}}};
// Red at blue sites and blue at red sites.
constexpr Kernel5 kColorAtOpposite{{{0, 0, -1.5 / 8.0, 0, 0},
                                    {0, 2 / 8.0, 0, 2 / 8.0, 0},
                                    {-1.5 / 8.0, 0, 6 / 8.0, 0, -1.5 / 8.0},
                                    {0, 2 / 8.0, 0, 2 / 8.0, 0},
                                    {0, 0, -1.5 / 8.0, 0, 0}}};

}  // namespace

std::string to_string(DemosaicKind kind) {
  return kind == DemosaicKind::kBilinear ? "bilinear" : "mhc5x5";
}

std::string to_string(Transfer transfer) {
  switch (transfer) {
    case Transfer::kSrgb: return "srgb";
    case Transfer::kGamma22: return "gamma22";
    case Transfer::kLinear: return "linear";
  }
  return "unknown";
}

DemosaicKind parse_demosaic_kind(std::string_view name) {
  if (name == "bilinear") return DemosaicKind::kBilinear;
  if (name == "mhc5x5" || name == "mhc") return DemosaicKind::kMhc;
  throw Error(ErrorCode::kUnknownKind, "unknown demosaic kind: " + std::string(name));
}

Transfer parse_transfer(std::string_view name) {
  if (name == "srgb") return Transfer::kSrgb;
  if (name == "gamma22") return Transfer::kGamma22;
  if (name == "linear") return Transfer::kLinear;
  throw Error(ErrorCode::kUnknownKind, "unknown transfer: " + std::string(name));
}

void validate(const IspConfig& cfg) {
  for (double g : cfg.wb_gains) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw Error(ErrorCode::kInvalidArgument, "white-balance gains must be positive");
    }
  }
}

PlanarImage demosaic_bilinear(const RawImage& bayer, int threads) {
  check_bayer(bayer);
  const int w = bayer.width;
  const int h = bayer.height;
  PlanarImage out = make_rgb(w, h);
  auto sample = [&](int x, int y) { return bayer.at(mirror(x, w), mirror(y, h)); };
  parallel_for(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const Channel own = bayer.channel(x, y);
        const std::size_t i = bayer.index(x, y);
        for (Channel m : {Channel::R, Channel::G, Channel::B}) {
          double v;
          if (m == own) {
            v = bayer.data[i];
          } else if (m == Channel::G) {
            v = 0.25 * (sample(x - 1, y) + sample(x + 1, y) + sample(x, y - 1) +
                        sample(x, y + 1));
          } else if (own == Channel::G) {
            // Parity of the tile decides whether m lies along the row or the column.
            if (bayer.cfa.at(x + 1, y) == m) {
              v = 0.5 * (sample(x - 1, y) + sample(x + 1, y));
            } else {
              v = 0.5 * (sample(x, y - 1) + sample(x, y + 1));
            }
          } else {
            v = 0.25 * (sample(x - 1, y - 1) + sample(x + 1, y - 1) + sample(x - 1, y + 1) +
                        sample(x + 1, y + 1));
          }
          out.planes[plane_index(m)][i] = v;
        }
      }
    }
  });
  return out;
}

PlanarImage demosaic_mhc(const RawImage& bayer, int threads) {
  check_bayer(bayer);
  const int w = bayer.width;
  const int h = bayer.height;
  PlanarImage out = make_rgb(w, h);
  parallel_for(h, threads, [&](int y0, int y1) {
    double patch[5][5];
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool interior = x >= 2 && y >= 2 && x + 2 < w && y + 2 < h;
        for (int dy = -2; dy <= 2; ++dy) {
          for (int dx = -2; dx <= 2; ++dx) {
            patch[dy + 2][dx + 2] = interior ? bayer.at(x + dx, y + dy)
                                             : bayer.at(mirror(x + dx, w), mirror(y + dy, h));
          }
        }
        auto apply = [&](const Kernel5& k) {
          double acc = 0.0;
          for (int r = 0; r < 5; ++r) {
            for (int c = 0; c < 5; ++c) acc += k.k[r][c] * patch[r][c];
          }
          return acc;
        };
        const Channel own = bayer.channel(x, y);
        const std::size_t i = bayer.index(x, y);
        for (Channel m : {Channel::R, Channel::G, Channel::B}) {
          double v;
          if (m == own) {
            v = bayer.data[i];
          } else if (m == Channel::G) {
            v = apply(kGreenAtRb);
          } else if (own == Channel::G) {
            v = bayer.cfa.at(x + 1, y) == m ? apply(kColorAtGreenRow) : apply(kColorAtGreenCol);
          } else {
            v = apply(kColorAtOpposite);
          }
          out.planes[plane_index(m)][i] = v;
        }
      }
    }
  });
  return out;
}

PlanarImage demosaic(const RawImage& bayer, DemosaicKind kind, int threads) {
  return kind == DemosaicKind::kBilinear ? demosaic_bilinear(bayer, threads)
                                         : demosaic_mhc(bayer, threads);
}

double transfer_value(double v, Transfer transfer) {
  v = std::clamp(v, 0.0, 1.0);
  switch (transfer) {
    case Transfer::kSrgb:
      return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
    case Transfer::kGamma22:
      return std::pow(v, 1.0 / 2.2);
    case Transfer::kLinear:
      return v;
  }
  return v;
}

PlanarImage apply_transfer(const PlanarImage& rgb, Transfer transfer) {
  PlanarImage out = rgb;
  for (auto& plane : out.planes) {
    for (double& v : plane) v = transfer_value(v, transfer);
  }
  return out;
}

PlanarImage run_isp(const RawImage& bayer, const IspConfig& cfg, int threads) {
  validate(cfg);
  PlanarImage rgb = demosaic(bayer, cfg.demosaic, threads);
  for (std::size_t c = 0; c < 3; ++c) {
    const double gain = cfg.wb_gains[c];
    for (double& v : rgb.planes[c]) v = transfer_value(std::clamp(v * gain, 0.0, 1.0), cfg.transfer);
  }
  return rgb;
}

}  // namespace rgbw
