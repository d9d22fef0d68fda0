// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rgbw/cfa.hpp"
#include "rgbw/error.hpp"
#include "rgbw/harness.hpp"
#include "rgbw/remosaic.hpp"
#include "test_util.hpp"

namespace rgbw {
namespace {

const CfaDescriptor kRgbw = make_rgbw_default();
const CfaDescriptor kRggb = make_bayer("RGGB");

double raw_psnr(const RawImage& a, const RawImage& b) {
  double se = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) se += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
  return 10.0 * std::log10(1.0 / (se / static_cast<double>(a.data.size())));
}

TEST(Nearest, MatchesExhaustiveSearch) {
  const RawImage in = testing::random_raw(12, 12, kRgbw, 11);
  for (const char* phase : {"RGGB", "GRBG", "GBRG", "BGGR"}) {
    const CfaDescriptor out_cfa = make_bayer(phase);
    const RawImage out = remosaic_nearest(in, out_cfa, 3);
    EXPECT_EQ(out.cfa, out_cfa);
    for (int y = 0; y < 12; ++y) {
      for (int x = 0; x < 12; ++x) {
        const Channel target = out_cfa.at(x, y);
        int best = std::numeric_limits<int>::max();
        double value = -1.0;
        // Row-major scan with strict improvement keeps the smallest (y, x).
        for (int sy = 0; sy < 12; ++sy) {
          for (int sx = 0; sx < 12; ++sx) {
            if (in.channel(sx, sy) != target) continue;
            const int d = (sx - x) * (sx - x) + (sy - y) * (sy - y);
            if (d < best) {
              best = d;
              value = in.at(sx, sy);
            }
          }
        }
        ASSERT_EQ(out.at(x, y), value) << phase << " at " << x << "," << y;
      }
    }
  }
}

TEST(Nearest, ConstantAndPassThrough) {
  RawImage flat(16, 16, kRgbw, 0.37);
  for (double v : remosaic_nearest(flat, kRggb).data) EXPECT_EQ(v, 0.37);
  const RawImage in = testing::random_raw(16, 16, kRgbw, 12);
  const RawImage out = remosaic_nearest(in, kRggb);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if (in.channel(x, y) == kRggb.at(x, y)) EXPECT_EQ(out.at(x, y), in.at(x, y));
}

TEST(Nearest, RejectsWrongDescriptors) {
  const RawImage bayer = testing::random_raw(8, 8, kRggb, 1);
  EXPECT_THROW(remosaic_nearest(bayer, kRggb), Error);
  const RawImage in = testing::random_raw(8, 8, kRgbw, 1);
  EXPECT_THROW(remosaic_nearest(in, kRgbw), Error);
}

TEST(WhitePlane, ConstantAndRamp) {
  RawImage flat(16, 16, kRgbw, 0.6);
  for (double v : interpolate_white_plane(flat).data) EXPECT_EQ(v, 0.6);

  const RawImage ramp = testing::gray_raw(20, 20, kRgbw, [](int x, int) { return x / 64.0; });
  const Plane p = interpolate_white_plane(ramp, 2);
  for (int y = 1; y < 19; ++y)
    for (int x = 1; x < 19; ++x) EXPECT_DOUBLE_EQ(p.at(x, y), x / 64.0);
}

// Straight transcription of the edge-adaptive rule with mirrored borders.
double reference_white(const RawImage& img, int x, int y) {
  if (img.channel(x, y) == Channel::W) return img.at(x, y);
  auto m = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
  const double n = img.at(x, m(y - 1, img.height));
  const double s = img.at(x, m(y + 1, img.height));
  const double e = img.at(m(x + 1, img.width), y);
  const double w = img.at(m(x - 1, img.width), y);
  if (std::abs(n - s) < std::abs(e - w) * 0.5) return (n + s) / 2;
  if (std::abs(e - w) < std::abs(n - s) * 0.5) return (e + w) / 2;
  return (n + s + e + w) / 4;
}

TEST(WhitePlane, VerticalEdgeUsesVerticalPair) {
  const RawImage edge =
      testing::gray_raw(16, 16, kRgbw, [](int x, int) { return x < 8 ? 0.2 : 0.8; });
  const Plane p = interpolate_white_plane(edge);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      EXPECT_EQ(p.at(x, y), reference_white(edge, x, y));
      if (x == 7 || x == 8) EXPECT_EQ(p.at(x, y), x < 8 ? 0.2 : 0.8);
    }
  }
  const RawImage noise = testing::random_raw(16, 16, kRgbw, 13);
  const Plane q = interpolate_white_plane(noise);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) EXPECT_EQ(q.at(x, y), reference_white(noise, x, y));
}

TEST(WhitePlane, RequiresCheckerboard) {
  const RawImage bayer = testing::random_raw(8, 8, kRggb, 1);
  try {
    (void)interpolate_white_plane(bayer);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDescriptorShape);
  }
}

TEST(WhiteGuided, ConstantInput) {
  RawImage flat(24, 24, kRgbw, 0.42);
  const RawImage out = remosaic_white_guided(flat, kRggb);
  EXPECT_EQ(out.cfa, kRggb);
  for (double v : out.data) EXPECT_EQ(v, 0.42);
}

TEST(WhiteGuided, AchromaticRampIsExactInInterior) {
  // Dyadic affine values keep every intermediate sum exact.
  auto f = [](int x, int y) { return (x + 2 * y) / 256.0; };
  const RawImage in = testing::gray_raw(32, 32, kRgbw, f);
  const Plane white = interpolate_white_plane(in);
  const RawImage out = remosaic_white_guided(in, kRggb, 4);
  for (int y = 6; y < 26; ++y) {
    for (int x = 6; x < 26; ++x) {
      EXPECT_EQ(out.at(x, y), white.at(x, y));
      if (in.channel(x, y) == Channel::W) EXPECT_EQ(out.at(x, y), in.at(x, y));
      EXPECT_LE(std::abs(out.at(x, y) - f(x, y)), 1e-6);
    }
  }
}

TEST(WhiteGuided, PassThroughOnMatchingChannels) {
  const RawImage in = testing::random_raw(20, 20, kRgbw, 14);
  const RawImage out = remosaic_white_guided(in, kRggb);
  int matches = 0;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      EXPECT_GE(out.at(x, y), 0.0);
      EXPECT_LE(out.at(x, y), 1.0);
      if (in.channel(x, y) == kRggb.at(x, y)) {
        EXPECT_EQ(out.at(x, y), in.at(x, y));
        ++matches;
      }
    }
  }
  EXPECT_GT(matches, 0);
}

TEST(WhiteGuided, ThreadCountDoesNotMatter) {
  const RawImage in = testing::random_raw(40, 36, kRgbw, 15);
  EXPECT_EQ(remosaic_white_guided(in, kRggb, 1).data, remosaic_white_guided(in, kRggb, 5).data);
}

TEST(FilterBank, IdentityAndZeroBanks) {
  const RawImage in = testing::random_raw(16, 16, kRgbw, 16);
  const RawImage id = apply_filter_bank(in, make_center_tap_bank(kRgbw, kRggb, 2, 1.0));
  EXPECT_EQ(id.cfa, kRggb);
  EXPECT_EQ(id.data, in.data);
  const RawImage zero = apply_filter_bank(in, make_center_tap_bank(kRgbw, kRggb, 2, 0.0));
  for (double v : zero.data) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(apply_filter_bank(testing::random_raw(8, 8, kRggb, 1),
                                 make_center_tap_bank(kRgbw, kRggb, 2, 1.0)),
               Error);
}

TEST(FilterBank, SerializationRoundTrip) {
  FilterBank bank = make_center_tap_bank(kRgbw, kRggb, 1, 0.0);
  bank.lambda = 1e-4;
  double v = 0.1;
  for (auto& k : bank.weights)
    for (double& t : k) t = (v *= -1.0001) / 3.0;
  const Bytes bytes = write_filter_bank(bank);
  const std::string head(bytes.begin(), bytes.begin() + 8);
  EXPECT_EQ(head, "RGBWFB1\n");
  const FilterBank back = read_filter_bank(bytes, CfaRegistry::with_defaults());
  EXPECT_EQ(back.patch_radius, 1);
  EXPECT_EQ(back.cfa_in, kRgbw);
  EXPECT_EQ(back.cfa_out, kRggb);
  EXPECT_EQ(back.lambda, 1e-4);
  EXPECT_EQ(back.weights, bank.weights);
  Bytes cut(bytes.begin(), bytes.end() - 3);
  EXPECT_THROW(read_filter_bank(cut, CfaRegistry::with_defaults()), Error);
}

TEST(FilterBank, RecoversKnownKernel) {
  const double kernel[9] = {0.05, -0.1, 0.15, 0.2, 0.4, 0.1, -0.05, 0.15, 0.1};
  std::vector<PairSample> pairs;
  for (std::uint64_t s = 0; s < 3; ++s) {
    PairSample p;
    p.input_rgbw = testing::random_raw(40, 40, kRgbw, 100 + s);
    p.gt_bayer = RawImage(40, 40, kRggb);
    for (int y = 1; y < 39; ++y) {
      for (int x = 1; x < 39; ++x) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) acc += kernel[(dy + 1) * 3 + dx + 1] * p.input_rgbw.at(x + dx, y + dy);
        p.gt_bayer.at(x, y) = acc;
      }
    }
    pairs.push_back(std::move(p));
  }
  const FilterBank bank = train_filter_bank(pairs, 1, 1e-12, 4);
  ASSERT_EQ(bank.weights.size(), 16u);
  for (std::size_t p = 0; p < 16; ++p) {
    EXPECT_LE(bank.fits[p].relative_residual, kRidgeResidualBound);
    for (int t = 0; t < 9; ++t) EXPECT_NEAR(bank.weights[p][static_cast<std::size_t>(t)], kernel[t], 1e-6);
  }
  const auto a = accumulate_normal_equations(pairs, 1, 1);
  const auto b = accumulate_normal_equations(pairs, 1, 7);
  for (std::size_t p = 0; p < a.size(); ++p) {
    EXPECT_EQ(a[p].rhs, b[p].rhs);
    EXPECT_EQ(a[p].rows, b[p].rows);
  }
}

TEST(FilterBank, ConstantPairsAreInsufficient) {
  PairSample p;
  p.input_rgbw = RawImage(32, 32, kRgbw, 0.5);
  p.gt_bayer = RawImage(32, 32, kRggb, 0.5);
  std::vector<PairSample> pairs{p};
  try {
    (void)train_filter_bank(pairs, 2, 1e-4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
}

TEST(FilterBank, TrainedBankBeatsNearestOnHeldOutScenes) {
  SyntheticSetOptions train_opts;
  train_opts.scenes = 5;
  train_opts.size = 96;
  train_opts.gains = {0};
  train_opts.seed = 1;
  SyntheticSetOptions test_opts = train_opts;
  test_opts.seed = 2;
  const auto registry = NoiseRegistry::with_defaults();
  const auto train = make_synthetic_pairs(train_opts, registry);
  const auto held_out = make_synthetic_pairs(test_opts, registry);
  const FilterBank bank = train_filter_bank(train, 2, 1e-4, 4);
  double bank_psnr = 0.0, nearest_psnr = 0.0;
  for (const auto& p : held_out) {
    bank_psnr += raw_psnr(apply_filter_bank(p.input_rgbw, bank), p.gt_bayer);
    nearest_psnr += raw_psnr(remosaic_nearest(p.input_rgbw, p.gt_bayer.cfa), p.gt_bayer);
  }
  EXPECT_GE(bank_psnr, nearest_psnr);
}

}  // namespace
}  // namespace rgbw
