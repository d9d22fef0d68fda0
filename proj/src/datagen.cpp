// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rgbw/cfa.hpp"
#include "rgbw/error.hpp"
#include "rgbw/parallel.hpp"

namespace rgbw {

CfaDescriptor binned_bayer_descriptor(const CfaDescriptor& rgbw) {
  if (rgbw.tile_width % 2 != 0 || rgbw.tile_height % 2 != 0 || !rgbw.is_rgbw()) {
    throw Error(ErrorCode::kDescriptorShape,
                "diagonal binning needs an even-sized RGBW tile, got " + rgbw.name);
  }
  const int bw = rgbw.tile_width / 2;
  const int bh = rgbw.tile_height / 2;
  std::vector<std::string> rows(static_cast<std::size_t>(bh));
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      const Channel a = rgbw.at(2 * bx, 2 * by);
      const Channel b = rgbw.at(2 * bx + 1, 2 * by);
      const Channel c = rgbw.at(2 * bx, 2 * by + 1);
      const Channel d = rgbw.at(2 * bx + 1, 2 * by + 1);
      Channel color;
      if (a == Channel::W && d == Channel::W && b == c && b != Channel::W) {
        color = b;
      } else if (b == Channel::W && c == Channel::W && a == d && a != Channel::W) {
        color = a;
      } else {
        throw Error(ErrorCode::kDescriptorShape,
                    "2x2 sub-block without a W diagonal and a color diagonal in " + rgbw.name);
      }
      rows[static_cast<std::size_t>(by)].push_back(channel_letter(color));
    }
  }
  std::string name;
  for (const auto& r : rows) name += r;
  auto bayer = make_cfa(name, rows);
  if (!bayer.is_bayer()) {
    throw Error(ErrorCode::kDescriptorShape, "binned sub-block colors are not a Bayer tile");
  }
  return bayer;
}

BinnedCapture diagonal_bin(const RawImage& rgbw) {
  if (rgbw.width % 2 != 0 || rgbw.height % 2 != 0) {
    throw Error(ErrorCode::kOddDimension, "diagonal binning needs even dimensions");
  }
  BinnedCapture out;
  out.dbinb = RawImage(rgbw.width / 2, rgbw.height / 2, binned_bayer_descriptor(rgbw.cfa));
  out.dbinb.black_level = rgbw.black_level;
  out.dbinb.white_level = rgbw.white_level;
  out.dbinc = Plane(rgbw.width / 2, rgbw.height / 2);
  for (int by = 0; by < out.dbinc.height; ++by) {
    for (int bx = 0; bx < out.dbinc.width; ++bx) {
      const int x = 2 * bx;
      const int y = 2 * by;
      const double a = rgbw.at(x, y);
      const double b = rgbw.at(x + 1, y);
      const double c = rgbw.at(x, y + 1);
      const double d = rgbw.at(x + 1, y + 1);
      const std::size_t i = out.dbinc.index(bx, by);
      if (rgbw.channel(x, y) == Channel::W) {
        out.dbinc.data[i] = 0.5 * (a + d);
        out.dbinb.data[i] = 0.5 * (b + c);
      } else {
        out.dbinc.data[i] = 0.5 * (b + c);
        out.dbinb.data[i] = 0.5 * (a + d);
      }
    }
  }
  return out;
}

PairSample generate_pair(const RawImage& capture, const PairOptions& options,
                         std::string scene_id) {
  const CfaDescriptor input_cfa =
      options.input_cfa.name.empty() ? make_rgbw_default() : options.input_cfa;
  const CfaDescriptor output_cfa =
      options.output_cfa.name.empty() ? make_bayer("RGGB") : options.output_cfa;

  const BinnedCapture binned = diagonal_bin(capture);
  PlanarImage rgb = demosaic(binned.dbinb, options.demosaic, options.threads);
  for (auto& plane : rgb.planes) {
    for (double& v : plane) v = std::clamp(v, 0.0, 1.0);
  }
  rgb.channels.push_back(Channel::W);
  rgb.planes.push_back(binned.dbinc.data);

  PairSample pair;
  pair.input_rgbw = mosaic(rgb, input_cfa);
  pair.gt_bayer = mosaic(rgb, output_cfa);
  for (RawImage* r : {&pair.input_rgbw, &pair.gt_bayer}) {
    r->black_level = capture.black_level;
    r->white_level = capture.white_level;
  }
  pair.scene_id = std::move(scene_id);
  pair.gain_db = 0;
  return pair;
}

RawImage crop_center(const RawImage& img, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "crop size must be positive");
  }
  if (width > img.width || height > img.height) {
    throw Error(ErrorCode::kCropTooLarge,
                "crop " + std::to_string(width) + "x" + std::to_string(height) +
                    " exceeds image " + std::to_string(img.width) + "x" +
                    std::to_string(img.height));
  }
  const int tw = img.cfa.tile_width;
  const int th = img.cfa.tile_height;
  const int x0 = ((img.width - width) / 2) / tw * tw;
  const int y0 = ((img.height - height) / 2) / th * th;
  RawImage out(width, height, img.cfa);
  out.black_level = img.black_level;
  out.white_level = img.white_level;
  for (int y = 0; y < height; ++y) {
    const auto src = img.data.begin() + static_cast<std::ptrdiff_t>(img.index(x0, y0 + y));
    std::copy(src, src + width, out.data.begin() + static_cast<std::ptrdiff_t>(out.index(0, y)));
  }
  return out;
}

namespace {

// Uniform draws from raw mt19937_64 bits.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

struct Rgb {
  double r, g, b;
};

Rgb random_color(SceneRng& rng, double lo, double hi) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

Rgb mix(const Rgb& a, const Rgb& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

void put(PlanarImage& img, int x, int y, const Rgb& c) {
  const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
  img.planes[0][i] = c.r;
  img.planes[1][i] = c.g;
  img.planes[2][i] = c.b;
}

void fill_slanted_edge(PlanarImage& img, SceneRng& rng) {
  const Rgb dark = random_color(rng, 0.05, 0.35);
  const Rgb bright = random_color(rng, 0.6, 0.95);
  for (int y = 0; y < img.height; ++y) {
    const double edge = slanted_edge_position(img.width, img.height, y);
    for (int x = 0; x < img.width; ++x) {
      // Fraction of the pixel footprint [x, x+1) right of the edge.
      const double t = std::clamp(x + 1.0 - edge, 0.0, 1.0);
      put(img, x, y, mix(dark, bright, t));
    }
  }
}

void fill_text_glyphs(PlanarImage& img, SceneRng& rng) {
  const Rgb sheet = random_color(rng, 0.7, 0.95);
  const Rgb ink = random_color(rng, 0.02, 0.25);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) put(img, x, y, sheet);
  }
  // Glyphs on a text grid: each glyph is a handful of 1-3 pixel strokes.
  const int cell_w = rng.integer(7, 12);
  const int cell_h = rng.integer(10, 16);
  for (int cy = 2; cy + cell_h < img.height; cy += cell_h + 2) {
    for (int cx = 2; cx + cell_w < img.width; cx += cell_w + 1) {
      if (rng.uniform() < 0.15) continue;  // word gaps
      const int strokes = rng.integer(2, 4);
      for (int s = 0; s < strokes; ++s) {
        const bool vertical = rng.uniform() < 0.5;
        const int thick = rng.integer(1, 2);
        const int len = vertical ? rng.integer(cell_h / 2, cell_h - 1)
                                 : rng.integer(cell_w / 2, cell_w - 1);
        const int ox = cx + rng.integer(0, cell_w - (vertical ? thick : len));
        const int oy = cy + rng.integer(0, cell_h - (vertical ? len : thick));
        for (int a = 0; a < len; ++a) {
          for (int t = 0; t < thick; ++t) {
            const int x = vertical ? ox + t : ox + a;
            const int y = vertical ? oy + a : oy + t;
            if (x < img.width && y < img.height) put(img, x, y, ink);
          }
        }
      }
    }
  }
}

void fill_mesh(PlanarImage& img, SceneRng& rng) {
  const Rgb back = random_color(rng, 0.3, 0.8);
  const Rgb wire = random_color(rng, 0.0, 0.3);
  const double pitch = rng.uniform(3.0, 6.0);
  const double angle = rng.uniform(0.0, std::numbers::pi / 4);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double u = (x * ca + y * sa) / pitch;
      const double v = (-x * sa + y * ca) / pitch;
      const double du = std::abs(u - std::round(u));
      const double dv = std::abs(v - std::round(v));
      const double line = std::clamp(1.5 - 6.0 * std::min(du, dv), 0.0, 1.0);
      const double shade = 0.85 + 0.15 * std::sin(0.05 * x) * std::cos(0.07 * y);
      Rgb c = mix(back, wire, line);
      c = {c.r * shade, c.g * shade, c.b * shade};
      put(img, x, y, c);
    }
  }
}

void fill_color_ramp(PlanarImage& img, SceneRng&) {
  const double sx = 1.0 / (img.width - 1);
  const double sy = 1.0 / (img.height - 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      put(img, x, y, {x * sx, y * sy, 1.0 - 0.5 * (x * sx + y * sy)});
    }
  }
}

void fill_noise_field(PlanarImage& img, SceneRng& rng) {
  // Sum of random plane waves per channel: band-limited texture.
  constexpr int kWaves = 12;
  for (std::size_t c = 0; c < 3; ++c) {
    double fx[kWaves], fy[kWaves], ph[kWaves], amp[kWaves];
    double total = 0.0;
    for (int k = 0; k < kWaves; ++k) {
      const double freq = rng.uniform(0.02, 0.45);
      const double dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
      fx[k] = freq * std::cos(dir);
      fy[k] = freq * std::sin(dir);
      ph[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      amp[k] = rng.uniform(0.2, 1.0);
      total += amp[k];
    }
    const double base = rng.uniform(0.35, 0.65);
    const double scale = 0.3 / total;
    auto& plane = img.planes[c];
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        double acc = 0.0;
        for (int k = 0; k < kWaves; ++k) acc += amp[k] * std::sin(fx[k] * x + fy[k] * y + ph[k]);
        plane[static_cast<std::size_t>(y) * img.width + x] = std::clamp(base + scale * acc, 0.0, 1.0);
      }
    }
  }
}

}  // namespace

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kSlantedEdge: return "slanted_edge";
    case SceneKind::kTextGlyphs: return "text_glyphs";
    case SceneKind::kMesh: return "mesh";
    case SceneKind::kColorRamp: return "color_ramp";
    case SceneKind::kNoiseField: return "noise_field";
  }
  return "unknown";
}

SceneKind parse_scene_kind(std::string_view name) {
  for (SceneKind k : all_scene_kinds()) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kUnknownKind, "unknown scene kind: " + std::string(name));
}

const std::vector<SceneKind>& all_scene_kinds() {
  static const std::vector<SceneKind> kinds{SceneKind::kSlantedEdge, SceneKind::kTextGlyphs,
                                            SceneKind::kMesh, SceneKind::kColorRamp,
                                            SceneKind::kNoiseField};
  return kinds;
}

double slanted_edge_position(int width, int height, int y) {
  const double slope = std::tan(kSlantedEdgeDegrees * std::numbers::pi / 180.0);
  return 0.5 * width + (y - 0.5 * height) * slope;
}

PlanarImage generate_synthetic_scene(SceneKind kind, int width, int height,
                                     std::uint64_t seed) {
  if (width < 32 || height < 32) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic scenes need at least 32x32 pixels");
  }
  PlanarImage img(width, height, {Channel::R, Channel::G, Channel::B, Channel::W});
  SceneRng rng(seed);
  switch (kind) {
    case SceneKind::kSlantedEdge: fill_slanted_edge(img, rng); break;
    case SceneKind::kTextGlyphs: fill_text_glyphs(img, rng); break;
    case SceneKind::kMesh: fill_mesh(img, rng); break;
    case SceneKind::kColorRamp: fill_color_ramp(img, rng); break;
    case SceneKind::kNoiseField: fill_noise_field(img, rng); break;
  }
  auto& w = img.planes[3];
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    w[i] = std::clamp(synthesize_white(img.planes[0][i], img.planes[1][i], img.planes[2][i]),
                      0.0, 1.0);
  }
  return img;
}

}  // namespace rgbw
