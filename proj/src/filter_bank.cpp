// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <map>
#include <sstream>

#include "rgbw/error.hpp"
#include "rgbw/parallel.hpp"
#include "rgbw/remosaic.hpp"

namespace rgbw {
namespace {

constexpr std::string_view kBankMagic = "RGBWFB1";

void check_phase_compatible(const CfaDescriptor& cfa_in, const CfaDescriptor& cfa_out) {
  // Each input phase must map to a single output channel.
  if (cfa_in.tile_width % cfa_out.tile_width != 0 ||
      cfa_in.tile_height % cfa_out.tile_height != 0) {
    throw Error(ErrorCode::kDescriptorMismatch,
                "output tile " + cfa_out.name + " must divide input tile " + cfa_in.name);
  }
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Gathers the (2r+1)^2 patch around (x, y) with replicate padding.
void gather_patch(const RawImage& img, int x, int y, int radius, double* patch) {
  const bool interior =
      x >= radius && y >= radius && x + radius < img.width && y + radius < img.height;
  int k = 0;
  for (int dy = -radius; dy <= radius; ++dy) {
    if (interior) {
      const double* row = &img.data[img.index(x - radius, y + dy)];
      for (int dx = 0; dx <= 2 * radius; ++dx) patch[k++] = row[dx];
    } else {
      const int sy = clamp_index(y + dy, img.height);
      for (int dx = -radius; dx <= radius; ++dx) {
        patch[k++] = img.at(clamp_index(x + dx, img.width), sy);
      }
    }
  }
}

}  // namespace

FilterBank make_center_tap_bank(const CfaDescriptor& cfa_in, const CfaDescriptor& cfa_out,
                                int radius, double center) {
  FilterBank bank;
  bank.patch_radius = radius;
  bank.cfa_in = cfa_in;
  bank.cfa_out = cfa_out;
  bank.lambda = 0.0;
  std::vector<double> kernel(static_cast<std::size_t>(bank.taps()), 0.0);
  kernel[static_cast<std::size_t>(bank.taps() / 2)] = center;
  bank.weights.assign(static_cast<std::size_t>(bank.phases()), kernel);
  return bank;
}

std::vector<NormalEquations> accumulate_normal_equations(std::span<const PairSample> pairs,
                                                         int patch_radius, int threads) {
  if (pairs.empty()) throw Error(ErrorCode::kInsufficientData, "no training pairs");
  if (patch_radius < 0) throw Error(ErrorCode::kInvalidArgument, "negative patch radius");
  const CfaDescriptor& cfa_in = pairs.front().input_rgbw.cfa;
  const CfaDescriptor& cfa_out = pairs.front().gt_bayer.cfa;
  check_phase_compatible(cfa_in, cfa_out);
  for (const auto& p : pairs) {
    if (p.input_rgbw.cfa != cfa_in || p.gt_bayer.cfa != cfa_out) {
      throw Error(ErrorCode::kDescriptorMismatch, "training pairs mix CFA descriptors");
    }
    if (p.input_rgbw.width != p.gt_bayer.width || p.input_rgbw.height != p.gt_bayer.height) {
      throw Error(ErrorCode::kDimensionMismatch, "pair " + p.scene_id + " has unequal sizes");
    }
  }

  const int tw = cfa_in.tile_width;
  const int th = cfa_in.tile_height;
  const int phases = tw * th;
  const int side = 2 * patch_radius + 1;
  std::vector<NormalEquations> eqs(static_cast<std::size_t>(phases), NormalEquations(side * side));

  // Parallel over phases; rows within a phase in (pair, y, x) order.
  parallel_for(phases, threads, [&](int p0, int p1) {
    std::vector<double> patch(static_cast<std::size_t>(side * side));
    for (int p = p0; p < p1; ++p) {
      const int phase_x = p % tw;
      const int phase_y = p / tw;
      auto& eq = eqs[static_cast<std::size_t>(p)];
      for (const auto& pair : pairs) {
        const RawImage& in = pair.input_rgbw;
        const int y_first = patch_radius + ((phase_y - patch_radius) % th + th) % th;
        const int x_first = patch_radius + ((phase_x - patch_radius) % tw + tw) % tw;
        for (int y = y_first; y + patch_radius < in.height; y += th) {
          for (int x = x_first; x + patch_radius < in.width; x += tw) {
            gather_patch(in, x, y, patch_radius, patch.data());
            eq.add_row(patch, pair.gt_bayer.at(x, y));
          }
        }
      }
      eq.finalize();
    }
  });
  return eqs;
}

FilterBank train_filter_bank(std::span<const PairSample> pairs, int patch_radius, double lambda,
                             int threads) {
  auto eqs = accumulate_normal_equations(pairs, patch_radius, threads);
  FilterBank bank;
  bank.patch_radius = patch_radius;
  bank.cfa_in = pairs.front().input_rgbw.cfa;
  bank.cfa_out = pairs.front().gt_bayer.cfa;
  bank.lambda = lambda;
  bank.weights.resize(eqs.size());
  bank.fits.resize(eqs.size());
  for (std::size_t p = 0; p < eqs.size(); ++p) {
    RidgeSolution sol;
    try {
      sol = solve_ridge(eqs[p], lambda);
    } catch (const Error& e) {
      throw Error(e.code(), "phase " + std::to_string(p) + ": " + e.what());
    }
    bank.weights[p] = std::move(sol.weights);
    bank.fits[p] = PhaseFit{eqs[p].rows, sol.method, sol.residual, sol.relative_residual};
  }
  return bank;
}

RawImage apply_filter_bank(const RawImage& rgbw, const FilterBank& bank, int threads) {
  if (rgbw.cfa != bank.cfa_in) {
    throw Error(ErrorCode::kDescriptorMismatch, "filter bank expects " + bank.cfa_in.name +
                                                    " input, got " + rgbw.cfa.name);
  }
  if (static_cast<int>(bank.weights.size()) != bank.phases()) {
    throw Error(ErrorCode::kInvalidArgument, "filter bank phase count mismatch");
  }
  for (const auto& k : bank.weights) {
    if (static_cast<int>(k.size()) != bank.taps()) {
      throw Error(ErrorCode::kInvalidArgument, "filter bank kernel size mismatch");
    }
  }
  RawImage out(rgbw.width, rgbw.height, bank.cfa_out);
  out.black_level = rgbw.black_level;
  out.white_level = rgbw.white_level;
  const int taps = bank.taps();
  parallel_for(rgbw.height, threads, [&](int y0, int y1) {
    std::vector<double> patch(static_cast<std::size_t>(taps));
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < rgbw.width; ++x) {
        gather_patch(rgbw, x, y, bank.patch_radius, patch.data());
        const auto& k = bank.weights[static_cast<std::size_t>(bank.phase(x, y))];
        double acc = 0.0;
        for (int t = 0; t < taps; ++t) acc += k[static_cast<std::size_t>(t)] * patch[static_cast<std::size_t>(t)];
        out.at(x, y) = std::clamp(acc, 0.0, 1.0);
      }
    }
  });
  return out;
}

Bytes write_filter_bank(const FilterBank& bank) {
  std::ostringstream header;
  header << kBankMagic << '\n'
         << "radius=" << bank.patch_radius << '\n'
         << "cfa_in=" << bank.cfa_in.name << '\n'
         << "cfa_out=" << bank.cfa_out.name << '\n'
         << "lambda=" << std::setprecision(17) << bank.lambda << '\n'
         << "phases=" << bank.weights.size() << '\n'
         << "taps=" << bank.taps() << '\n'
         << "end\n";
  const std::string text = header.str();
  Bytes out(text.begin(), text.end());
  for (const auto& kernel : bank.weights) {
    if (static_cast<int>(kernel.size()) != bank.taps()) {
      throw Error(ErrorCode::kInvalidArgument, "filter bank kernel size mismatch");
    }
    for (double v : kernel) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
  }
  return out;
}

FilterBank read_filter_bank(std::span<const std::uint8_t> bytes, const CfaRegistry& registry) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    const std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    if (pos >= bytes.size()) throw Error(ErrorCode::kTruncated, "filter bank header truncated");
    std::string line(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                     bytes.begin() + static_cast<std::ptrdiff_t>(pos));
    ++pos;
    return line;
  };
  if (next_line() != kBankMagic) throw Error(ErrorCode::kBadMagic, "not a filter bank");
  std::map<std::string, std::string> fields;
  for (std::string line = next_line(); line != "end"; line = next_line()) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "malformed filter bank header line: " + line);
    }
    fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto field = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorCode::kInvalidArgument, "filter bank lacks " + key);
    return it->second;
  };
  FilterBank bank;
  try {
    bank.patch_radius = std::stoi(field("radius"));
    bank.lambda = std::stod(field("lambda"));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "malformed numeric field in filter bank header");
  }
  bank.cfa_in = registry.find(field("cfa_in"));
  bank.cfa_out = registry.find(field("cfa_out"));
  if (bank.patch_radius < 0 || bank.patch_radius > 64) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported filter bank radius");
  }
  if (field("phases") != std::to_string(bank.phases()) ||
      field("taps") != std::to_string(bank.taps())) {
    throw Error(ErrorCode::kInvalidArgument, "filter bank header disagrees with its CFA");
  }
  const std::size_t count = static_cast<std::size_t>(bank.phases()) * bank.taps();
  if (bytes.size() - pos < count * 8) throw Error(ErrorCode::kTruncated, "filter bank taps truncated");
  bank.weights.assign(static_cast<std::size_t>(bank.phases()),
                      std::vector<double>(static_cast<std::size_t>(bank.taps())));
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[pos + i * 8 + b]) << (8 * b);
    const double v = std::bit_cast<double>(bits);
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite filter tap");
    bank.weights[i / bank.taps()][i % bank.taps()] = v;
  }
  return bank;
}

}  // namespace rgbw
