// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rgbw {

/// Color identity of a sensor site or an image plane.
enum class Channel : std::uint8_t { R, G, B, W };

char channel_letter(Channel c);
std::optional<Channel> channel_from_letter(char c);

/// Periodic color filter array tile, row-major.
///
/// Malformed tiles are representable; validate_descriptor() reports them and
/// every other operation assumes a valid descriptor.
struct CfaDescriptor {
  std::string name;
  int tile_width = 0;
  int tile_height = 0;
  std::vector<Channel> layout;

  Channel at(int x, int y) const {
    return layout[static_cast<std::size_t>((y % tile_height) * tile_width +
                                           (x % tile_width))];
  }
  bool contains(Channel c) const;
  /// 2x2 tile with channel multiset {R, G, G, B}.
  bool is_bayer() const;
  /// Holds W plus all three colors.
  bool is_rgbw() const;
  /// Distinct channels in order of first appearance.
  std::vector<Channel> channels() const;

  bool operator==(const CfaDescriptor& other) const = default;
};

/// Single scalar plane, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double at(int x, int y) const { return data[index(x, y)]; }
  double& at(int x, int y) { return data[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
};

/// Mosaiced sensor frame. Samples live in the normalized [0,1] domain; the
/// levels only matter when quantizing at I/O boundaries.
struct RawImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;
  CfaDescriptor cfa;
  int black_level = 64;
  int white_level = 1023;

  RawImage() = default;
  RawImage(int w, int h, CfaDescriptor descriptor, double fill = 0.0)
      : width(w),
        height(h),
        data(static_cast<std::size_t>(w) * h, fill),
        cfa(std::move(descriptor)) {}

  double at(int x, int y) const { return data[index(x, y)]; }
  double& at(int x, int y) { return data[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  Channel channel(int x, int y) const { return cfa.at(x, y); }
};

/// Multi-channel float image, one plane per listed channel.
struct PlanarImage {
  int width = 0;
  int height = 0;
  std::vector<Channel> channels;
  std::vector<std::vector<double>> planes;

  PlanarImage() = default;
  PlanarImage(int w, int h, std::vector<Channel> chans, double fill = 0.0);

  bool has(Channel c) const;
  /// Throws Error(kMissingChannel) when absent.
  const std::vector<double>& plane(Channel c) const;
  std::vector<double>& plane(Channel c);
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
};

PlanarImage make_rgb(int width, int height, double fill = 0.0);

}  // namespace rgbw
