// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rgbw/image.hpp"

namespace rgbw {

/// Heteroscedastic Gaussian approximation of read + shot noise. The
/// parameters are given at unit gain in the normalized domain.
struct NoiseProfile {
  double gain_db = 0.0;
  double read_sigma = 2e-4;
  double shot_k = 1e-4;
};

inline constexpr double kDefaultReadSigma = 2e-4;
inline constexpr double kDefaultShotK = 1e-4;

double linear_gain(double gain_db);

/// shot_k*g*x + (read_sigma*g)^2 with g = 10^(gain_db/20).
double noise_variance(const NoiseProfile& profile, double x);

/// Adds zero-mean Gaussian noise of variance noise_variance(profile, x) to
/// every sample and clamps to [0,1]. Each pixel draws from a counter-based
/// generator keyed on (seed, pixel index), so output does not depend on the
/// number of threads or the traversal order.
RawImage synthesize_noise(const RawImage& raw, const NoiseProfile& profile, std::uint64_t seed,
                          int threads = 1);

/// Standard normal deviate for (seed, counter); exposed for testing.
double counter_normal(std::uint64_t seed, std::uint64_t counter);

/// Gain -> profile registry. Defaults cover the challenge gains 0/24/42 dB.
class NoiseRegistry {
 public:
  static NoiseRegistry with_defaults();

  /// key=value lines, e.g. "gain.24.read_sigma = 3e-4"; '#' starts a comment.
  /// Mentioning a new gain registers it on top of the default parameters.
  void load_config(const std::string& text);

  void set(const NoiseProfile& profile);
  /// Throws Error(kUnregisteredGain).
  NoiseProfile profile_for_gain(int gain_db) const;
  std::vector<int> gains() const;

 private:
  std::map<int, NoiseProfile> profiles_;
};

/// Profile from the default registry.
NoiseProfile profile_for_gain(int gain_db);

}  // namespace rgbw
