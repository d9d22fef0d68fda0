// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/cfa.hpp"

#include <algorithm>

#include "rgbw/error.hpp"
#include <cctype>

namespace rgbw {

CfaDescriptor make_cfa(std::string name, const std::vector<std::string>& rows) {
  CfaDescriptor cfa;
  cfa.name = std::move(name);
  cfa.tile_height = static_cast<int>(rows.size());
  cfa.tile_width = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != cfa.tile_width) {
      throw Error(ErrorCode::kInvalidArgument, "ragged CFA rows in " + cfa.name);
    }
    for (char ch : row) {
      const auto c = channel_from_letter(ch);
      if (!c) {
        throw Error(ErrorCode::kInvalidArgument,
                    std::string("unknown CFA letter '") + ch + "' in " + cfa.name);
      }
      cfa.layout.push_back(*c);
    }
  }
  return cfa;
}

CfaDescriptor make_rgbw_default() {
  return make_cfa(std::string(kDefaultRgbwName), {"WRWG", "RWGW", "WGWB", "GWBW"});
}

CfaDescriptor make_bayer(std::string_view phase) {
  if (phase.size() != 4) {
    throw Error(ErrorCode::kInvalidArgument, "Bayer phase must have four letters");
  }
  std::string p(phase);
  std::transform(p.begin(), p.end(), p.begin(),
                 [](char c) { return static_cast<char>(std::toupper(c)); });
  auto cfa = make_cfa(p, {p.substr(0, 2), p.substr(2, 2)});
  if (!cfa.is_bayer()) {
    throw Error(ErrorCode::kInvalidArgument, "not a Bayer phase: " + p);
  }
  return cfa;
}

Channel channel_at(const CfaDescriptor& cfa, int x, int y) { return cfa.at(x, y); }

bool white_is_quincunx(const CfaDescriptor& cfa) {
  if (cfa.tile_width % 2 != 0 || cfa.tile_height % 2 != 0) return false;
  if (cfa.layout.empty() || cfa.layout.size() !=
                                static_cast<std::size_t>(cfa.tile_width * cfa.tile_height)) {
    return false;
  }
  const int parity = cfa.at(0, 0) == Channel::W ? 0 : 1;
  for (int y = 0; y < cfa.tile_height; ++y) {
    for (int x = 0; x < cfa.tile_width; ++x) {
      const bool expect_white = ((x + y) & 1) == parity;
      if ((cfa.at(x, y) == Channel::W) != expect_white) return false;
    }
  }
  return true;
}

DescriptorReport validate_descriptor(const CfaDescriptor& cfa) {
  DescriptorReport report;
  auto fail = [&](std::string rule) {
    report.pass = false;
    report.violations.push_back(std::move(rule));
  };
  if (cfa.tile_width < 1) fail("tile_width must be >= 1");
  if (cfa.tile_height < 1) fail("tile_height must be >= 1");
  if (cfa.tile_width >= 1 && cfa.tile_height >= 1 &&
      cfa.layout.size() != static_cast<std::size_t>(cfa.tile_width * cfa.tile_height)) {
    fail("layout length must equal tile_width*tile_height");
  }
  if (!report.pass) return report;

  const bool has_white = cfa.contains(Channel::W);
  if (cfa.tile_width == 2 && cfa.tile_height == 2 && !has_white) {
    if (cfa.is_bayer()) {
      report.bayer = true;
    } else {
      fail("Bayer tile must hold the channel multiset {R,G,G,B}");
    }
  } else if (!has_white) {
    fail("descriptors without W must be 2x2 Bayer tiles");
  }

  if (has_white) {
    report.rgbw = cfa.is_rgbw();
    if (!report.rgbw) fail("RGBW tile must contain R, G, B and W");
    const auto whites = std::count(cfa.layout.begin(), cfa.layout.end(), Channel::W);
    if (static_cast<std::size_t>(whites) * 2 != cfa.layout.size()) {
      fail("W must occupy exactly half of the tile");
    }
    if (!white_is_quincunx(cfa)) fail("W sites must form a checkerboard");
  }
  return report;
}

RawImage mosaic(const PlanarImage& src, const CfaDescriptor& cfa) {
  for (Channel c : cfa.channels()) {
    if (!src.has(c)) {
      throw Error(ErrorCode::kMissingChannel,
                  std::string("CFA ") + cfa.name + " needs a " + channel_letter(c) +
                      " plane");
    }
  }
  if (src.width < cfa.tile_width || src.height < cfa.tile_height) {
    throw Error(ErrorCode::kInvalidArgument, "image smaller than CFA tile");
  }
  RawImage out(src.width, src.height, cfa);
  // Plane pointer per tile position.
  std::vector<const double*> source(cfa.layout.size());
  for (std::size_t i = 0; i < cfa.layout.size(); ++i) {
    source[i] = src.plane(cfa.layout[i]).data();
  }
  for (int y = 0; y < src.height; ++y) {
    const int ty = (y % cfa.tile_height) * cfa.tile_width;
    for (int x = 0; x < src.width; ++x) {
      const std::size_t i = out.index(x, y);
      out.data[i] = source[static_cast<std::size_t>(ty + x % cfa.tile_width)][i];
    }
  }
  return out;
}

PlanarImage expand_cfa_channels(const RawImage& raw) {
  if (!raw.cfa.is_rgbw()) {
    throw Error(ErrorCode::kDescriptorMismatch,
                "channel expansion needs an RGBW descriptor, got " + raw.cfa.name);
  }
  PlanarImage out(raw.width, raw.height,
                  {Channel::W, Channel::G, Channel::B, Channel::R}, 0.0);
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      const std::size_t i = raw.index(x, y);
      out.plane(raw.channel(x, y))[i] = raw.data[i];
    }
  }
  return out;
}

CfaRegistry CfaRegistry::with_defaults() {
  CfaRegistry reg;
  reg.add(make_rgbw_default());
  for (const char* phase : {"RGGB", "GRBG", "GBRG", "BGGR"}) reg.add(make_bayer(phase));
  return reg;
}

void CfaRegistry::add(CfaDescriptor cfa) {
  const auto report = validate_descriptor(cfa);
  if (!report.pass) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot register invalid CFA " + cfa.name + ": " + report.violations.front());
  }
  entries_[cfa.name] = std::move(cfa);
}

const CfaDescriptor& CfaRegistry::find(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownCfa, "unknown CFA name: " + name);
  return it->second;
}

bool CfaRegistry::contains(const std::string& name) const {
  return entries_.count(name) != 0;
}

}  // namespace rgbw
