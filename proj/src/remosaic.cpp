// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/remosaic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rgbw/error.hpp"
#include "rgbw/parallel.hpp"

namespace rgbw {
namespace {

void check_rgbw(const RawImage& img) {
  if (!img.cfa.is_rgbw()) {
    throw Error(ErrorCode::kDescriptorMismatch, "remosaic needs an RGBW input, got " +
                                                    img.cfa.name);
  }
}

void check_bayer_out(const CfaDescriptor& cfa_out) {
  if (!cfa_out.is_bayer()) {
    throw Error(ErrorCode::kDescriptorMismatch, "remosaic target must be Bayer, got " +
                                                    cfa_out.name);
  }
}

int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

struct Offset {
  int dx, dy;
};

}  // namespace

RawImage remosaic_nearest(const RawImage& rgbw, const CfaDescriptor& cfa_out, int threads) {
  check_rgbw(rgbw);
  check_bayer_out(cfa_out);
  const CfaDescriptor& cin = rgbw.cfa;
  const int period_x = std::lcm(cin.tile_width, cfa_out.tile_width);
  const int period_y = std::lcm(cin.tile_height, cfa_out.tile_height);
  const int reach_x = 2 * cin.tile_width;
  const int reach_y = 2 * cin.tile_height;

  // Candidate offsets per output phase, sorted by (distance, dy, dx).
  std::vector<std::vector<Offset>> candidates(static_cast<std::size_t>(period_x * period_y));
  for (int py = 0; py < period_y; ++py) {
    for (int px = 0; px < period_x; ++px) {
      const Channel target = cfa_out.at(px, py);
      auto& list = candidates[static_cast<std::size_t>(py * period_x + px)];
      for (int dy = -reach_y; dy <= reach_y; ++dy) {
        for (int dx = -reach_x; dx <= reach_x; ++dx) {
          // Adding whole periods keeps the tile lookup non-negative.
          if (cin.at(px + dx + period_x * reach_x, py + dy + period_y * reach_y) == target) {
            list.push_back({dx, dy});
          }
        }
      }
      std::sort(list.begin(), list.end(), [](const Offset& a, const Offset& b) {
        const int da = a.dx * a.dx + a.dy * a.dy;
        const int db = b.dx * b.dx + b.dy * b.dy;
        if (da != db) return da < db;
        if (a.dy != b.dy) return a.dy < b.dy;
        return a.dx < b.dx;
      });
    }
  }

  RawImage out(rgbw.width, rgbw.height, cfa_out);
  out.black_level = rgbw.black_level;
  out.white_level = rgbw.white_level;
  parallel_for(rgbw.height, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < rgbw.width; ++x) {
        const auto& list =
            candidates[static_cast<std::size_t>((y % period_y) * period_x + x % period_x)];
        bool found = false;
        for (const Offset& o : list) {
          const int sx = x + o.dx;
          const int sy = y + o.dy;
          if (sx >= 0 && sy >= 0 && sx < rgbw.width && sy < rgbw.height) {
            out.at(x, y) = rgbw.at(sx, sy);
            found = true;
            break;
          }
        }
        if (!found) {
          throw Error(ErrorCode::kInvalidArgument,
                      "image too small to hold every channel near each pixel");
        }
      }
    }
  });
  return out;
}

Plane interpolate_white_plane(const RawImage& rgbw, int threads) {
  if (!white_is_quincunx(rgbw.cfa)) {
    throw Error(ErrorCode::kDescriptorShape,
                "white interpolation needs checkerboard W sites, got " + rgbw.cfa.name);
  }
  const int w = rgbw.width;
  const int h = rgbw.height;
  if (w < 2 || h < 2) throw Error(ErrorCode::kInvalidArgument, "image too small");
  Plane out(w, h);
  parallel_for(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        if (rgbw.channel(x, y) == Channel::W) {
          out.at(x, y) = rgbw.at(x, y);
          continue;
        }
        const double n = rgbw.at(x, mirror(y - 1, h));
        const double s = rgbw.at(x, mirror(y + 1, h));
        const double e = rgbw.at(mirror(x + 1, w), y);
        const double wv = rgbw.at(mirror(x - 1, w), y);
        const double dv = std::abs(n - s);
        const double dh = std::abs(e - wv);
        double v;
        if (dv < dh * 0.5) {
          v = 0.5 * (n + s);
        } else if (dh < dv * 0.5) {
          v = 0.5 * (e + wv);
        } else {
          v = 0.25 * (n + s + e + wv);
        }
        out.at(x, y) = v;
      }
    }
  });
  return out;
}

RawImage remosaic_white_guided(const RawImage& rgbw, const CfaDescriptor& cfa_out,
                               int threads) {
  check_rgbw(rgbw);
  check_bayer_out(cfa_out);
  const Plane white = interpolate_white_plane(rgbw, threads);
  const int w = rgbw.width;
  const int h = rgbw.height;

  // Sparse color differences; only entries at color sites are ever read.
  std::vector<double> diff(rgbw.data.size(), 0.0);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = rgbw.data[i] - white.data[i];

  // Separable tent, one tile wide on each side.
  const int radius = std::max(rgbw.cfa.tile_width, rgbw.cfa.tile_height);
  std::vector<double> tent(static_cast<std::size_t>(2 * radius - 1));
  for (int d = -(radius - 1); d <= radius - 1; ++d) {
    tent[static_cast<std::size_t>(d + radius - 1)] = 1.0 - std::abs(d) / static_cast<double>(radius);
  }

  RawImage out(w, h, cfa_out);
  out.black_level = rgbw.black_level;
  out.white_level = rgbw.white_level;
  parallel_for(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const Channel target = cfa_out.at(x, y);
        const std::size_t i = rgbw.index(x, y);
        if (rgbw.channel(x, y) == target) {
          out.data[i] = rgbw.data[i];
          continue;
        }
        double num = 0.0;
        double den = 0.0;
        const int ylo = std::max(0, y - radius + 1);
        const int yhi = std::min(h - 1, y + radius - 1);
        const int xlo = std::max(0, x - radius + 1);
        const int xhi = std::min(w - 1, x + radius - 1);
        for (int sy = ylo; sy <= yhi; ++sy) {
          const double ky = tent[static_cast<std::size_t>(sy - y + radius - 1)];
          for (int sx = xlo; sx <= xhi; ++sx) {
            if (rgbw.channel(sx, sy) != target) continue;
            const double k = ky * tent[static_cast<std::size_t>(sx - x + radius - 1)];
            num += k * diff[rgbw.index(sx, sy)];
            den += k;
          }
        }
        const double d = den > 0.0 ? num / den : 0.0;
        out.data[i] = std::clamp(white.data[i] + d, 0.0, 1.0);
      }
    }
  });
  return out;
}

}  // namespace rgbw
