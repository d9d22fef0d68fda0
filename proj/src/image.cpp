// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/image.hpp"

#include <algorithm>
#include <utility>

#include "rgbw/error.hpp"

namespace rgbw {

char channel_letter(Channel c) {
  switch (c) {
    case Channel::R: return 'R';
    case Channel::G: return 'G';
    case Channel::B: return 'B';
    case Channel::W: return 'W';
  }
  return '?';
}

std::optional<Channel> channel_from_letter(char c) {
  switch (c) {
    case 'R': case 'r': return Channel::R;
    case 'G': case 'g': return Channel::G;
    case 'B': case 'b': return Channel::B;
    case 'W': case 'w': return Channel::W;
    default: return std::nullopt;
  }
}

bool CfaDescriptor::contains(Channel c) const {
  return std::find(layout.begin(), layout.end(), c) != layout.end();
}

bool CfaDescriptor::is_bayer() const {
  if (tile_width != 2 || tile_height != 2 || layout.size() != 4) return false;
  const auto n = [&](Channel c) { return std::count(layout.begin(), layout.end(), c); };
  return n(Channel::R) == 1 && n(Channel::G) == 2 && n(Channel::B) == 1;
}

bool CfaDescriptor::is_rgbw() const {
  return contains(Channel::W) && contains(Channel::R) && contains(Channel::G) &&
         contains(Channel::B);
}

std::vector<Channel> CfaDescriptor::channels() const {
  std::vector<Channel> out;
  for (Channel c : layout) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

PlanarImage::PlanarImage(int w, int h, std::vector<Channel> chans, double fill)
    : width(w), height(h), channels(std::move(chans)) {
  planes.assign(channels.size(),
                std::vector<double>(static_cast<std::size_t>(w) * h, fill));
}

bool PlanarImage::has(Channel c) const {
  return std::find(channels.begin(), channels.end(), c) != channels.end();
}

const std::vector<double>& PlanarImage::plane(Channel c) const {
  const auto it = std::find(channels.begin(), channels.end(), c);
  if (it == channels.end()) {
    throw Error(ErrorCode::kMissingChannel,
                std::string("planar image has no ") + channel_letter(c) + " plane");
  }
  return planes[static_cast<std::size_t>(it - channels.begin())];
}

std::vector<double>& PlanarImage::plane(Channel c) {
  return const_cast<std::vector<double>&>(std::as_const(*this).plane(c));
}

PlanarImage make_rgb(int width, int height, double fill) {
  return PlanarImage(width, height, {Channel::R, Channel::G, Channel::B}, fill);
}

}  // namespace rgbw
