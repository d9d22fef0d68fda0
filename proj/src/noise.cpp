// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rgbw/error.hpp"
#include "rgbw/parallel.hpp"

namespace rgbw {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Open interval (0,1): Box-Muller takes a logarithm.
double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double linear_gain(double gain_db) { return std::pow(10.0, gain_db / 20.0); }

double noise_variance(const NoiseProfile& profile, double x) {
  const double g = linear_gain(profile.gain_db);
  const double read = profile.read_sigma * g;
  return profile.shot_k * g * x + read * read;
}

double counter_normal(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t key = splitmix64(seed ^ 0x5851f42d4c957f2dull);
  const std::uint64_t a = splitmix64(key ^ splitmix64(2 * counter));
  const std::uint64_t b = splitmix64(key ^ splitmix64(2 * counter + 1));
  const double u1 = unit_open(a);
  const double u2 = unit_open(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RawImage synthesize_noise(const RawImage& raw, const NoiseProfile& profile, std::uint64_t seed,
                          int threads) {
  RawImage out = raw;
  if (profile.read_sigma == 0.0 && profile.shot_k == 0.0) return out;
  if (profile.read_sigma < 0.0 || profile.shot_k < 0.0 || !std::isfinite(profile.gain_db)) {
    throw Error(ErrorCode::kInvalidArgument, "noise profile parameters must be non-negative");
  }
  parallel_for(raw.height, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < raw.width; ++x) {
        const std::size_t i = raw.index(x, y);
        const double v = raw.data[i];
        const double sigma = std::sqrt(noise_variance(profile, v));
        out.data[i] = std::clamp(v + sigma * counter_normal(seed, i), 0.0, 1.0);
      }
    }
  });
  return out;
}

NoiseRegistry NoiseRegistry::with_defaults() {
  NoiseRegistry reg;
  for (int gain : {0, 24, 42}) {
    reg.set(NoiseProfile{static_cast<double>(gain), kDefaultReadSigma, kDefaultShotK});
  }
  return reg;
}

void NoiseRegistry::load_config(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "expected key=value" + where);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    // Keys outside gain.<dB>.<field> belong to other sections.
    if (key.rfind("gain.", 0) != 0) continue;
    const auto dot = key.find('.', 5);
    if (dot == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "malformed noise key " + key + where);
    }
    int gain = 0;
    double number = 0.0;
    try {
      gain = std::stoi(key.substr(5, dot - 5));
      std::size_t used = 0;
      number = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument, "malformed noise entry " + line + where);
    }
    if (!std::isfinite(number) || number < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "noise parameters must be finite and >= 0" + where);
    }
    NoiseProfile p = profiles_.count(gain)
                         ? profiles_.at(gain)
                         : NoiseProfile{static_cast<double>(gain), kDefaultReadSigma, kDefaultShotK};
    const std::string field = key.substr(dot + 1);
    if (field == "read_sigma") {
      p.read_sigma = number;
    } else if (field == "shot_k") {
      p.shot_k = number;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown noise field " + field + where);
    }
    profiles_[gain] = p;
  }
}

void NoiseRegistry::set(const NoiseProfile& profile) {
  profiles_[static_cast<int>(std::lround(profile.gain_db))] = profile;
}

NoiseProfile NoiseRegistry::profile_for_gain(int gain_db) const {
  const auto it = profiles_.find(gain_db);
  if (it == profiles_.end()) {
    throw Error(ErrorCode::kUnregisteredGain,
                "no noise profile registered for " + std::to_string(gain_db) + " dB");
  }
  return it->second;
}

std::vector<int> NoiseRegistry::gains() const {
  std::vector<int> out;
  for (const auto& [g, p] : profiles_) out.push_back(g);
  return out;
}

NoiseProfile profile_for_gain(int gain_db) {
  return NoiseRegistry::with_defaults().profile_for_gain(gain_db);
}

}  // namespace rgbw
