// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include <gtest/gtest.h>

#include <cmath>

#include "rgbw/cfa.hpp"
#include "rgbw/error.hpp"
#include "rgbw/isp.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace rgbw {
namespace {

const char* const kPhases[] = {"RGGB", "GRBG", "GBRG", "BGGR"};

double plane_at(const PlanarImage& img, Channel c, int x, int y) {
  return img.plane(c)[static_cast<std::size_t>(y) * img.width + x];
}

TEST(Demosaic, ConstantPreserving) {
  for (const char* phase : kPhases) {
    RawImage flat(10, 10, make_bayer(phase), 0.3);
    for (DemosaicKind kind : {DemosaicKind::kBilinear, DemosaicKind::kMhc}) {
      const PlanarImage rgb = demosaic(flat, kind);
      for (const auto& p : rgb.planes)
        for (double v : p) EXPECT_NEAR(v, 0.3, 1e-15);
    }
  }
}

TEST(Demosaic, KnownSamplesPassThrough) {
  const CfaDescriptor rggb = make_bayer("RGGB");
  const RawImage pure_r = testing::gray_raw(8, 8, rggb, [&](int x, int y) {
    return rggb.at(x, y) == Channel::R ? 1.0 : 0.0;
  });
  const RawImage noise = testing::random_raw(9, 7, make_bayer("GBRG"), 3);
  for (DemosaicKind kind : {DemosaicKind::kBilinear, DemosaicKind::kMhc}) {
    EXPECT_EQ(plane_at(demosaic(pure_r, kind), Channel::R, 2, 2), 1.0);
    const PlanarImage rgb = demosaic(noise, kind);
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 9; ++x) EXPECT_EQ(plane_at(rgb, noise.channel(x, y), x, y), noise.at(x, y));
  }
}

// Scalar bilinear: average every same-color sample in the 3x3 neighborhood,
// mirroring at the border.
TEST(Demosaic, BilinearMatchesNeighborhoodAverage) {
  for (const char* phase : kPhases) {
    const RawImage in = testing::random_raw(8, 8, make_bayer(phase), 4);
    const PlanarImage rgb = demosaic_bilinear(in, 2);
    auto m = [](int i) { return i < 0 ? -i : (i > 7 ? 14 - i : i); };
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        for (Channel c : {Channel::R, Channel::G, Channel::B}) {
          if (c == in.channel(x, y)) continue;
          double sum = 0.0;
          int n = 0;
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              // Green at a color site only uses the 4-connected stencil.
              if (c == Channel::G && dx != 0 && dy != 0) continue;
              if (in.cfa.at(x + dx + 2, y + dy + 2) != c) continue;
              sum += in.at(m(x + dx), m(y + dy));
              ++n;
            }
          }
          ASSERT_GT(n, 0);
          EXPECT_NEAR(plane_at(rgb, c, x, y), sum / n, 1e-15) << phase << " " << x << "," << y;
        }
      }
    }
  }
}

TEST(Demosaic, MhcExactOnAffineSignals) {
  for (const char* phase : kPhases) {
    const RawImage ramp = testing::gray_raw(16, 16, make_bayer(phase), [](int x, int y) {
      return 0.1 + 0.03 * x - 0.011 * y;
    });
    const PlanarImage rgb = demosaic_mhc(ramp, 3);
    for (int y = 2; y < 14; ++y)
      for (int x = 2; x < 14; ++x)
        for (Channel c : {Channel::R, Channel::G, Channel::B})
          EXPECT_NEAR(plane_at(rgb, c, x, y), ramp.at(x, y), 1e-12);
  }
}

TEST(Demosaic, MhcMatchesDirectConvolution) {
  for (const char* phase : kPhases) {
    const RawImage in = testing::random_raw(16, 16, make_bayer(phase), 5);
    const PlanarImage rgb = demosaic_mhc(in);
    for (int y = 2; y < 14; ++y) {
      for (int x = 2; x < 14; ++x) {
        for (Channel c : {Channel::R, Channel::G, Channel::B})
          EXPECT_NEAR(plane_at(rgb, c, x, y), oracle::mhc(in, x, y, c), 1e-12);
      }
    }
  }
}

TEST(Demosaic, RejectsNonBayer) {
  const RawImage in = testing::random_raw(8, 8, make_rgbw_default(), 1);
  EXPECT_THROW(demosaic_mhc(in), Error);
  EXPECT_THROW(demosaic_bilinear(in), Error);
}

TEST(Transfer, Curves) {
  for (Transfer t : {Transfer::kSrgb, Transfer::kGamma22, Transfer::kLinear}) {
    EXPECT_EQ(transfer_value(0.0, t), 0.0);
    EXPECT_NEAR(transfer_value(1.0, t), 1.0, 1e-15);
    EXPECT_EQ(transfer_value(-0.5, t), 0.0);
    EXPECT_NEAR(transfer_value(1.5, t), 1.0, 1e-15);
    double prev = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double v = transfer_value(i / 1000.0, t);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
  EXPECT_NEAR(transfer_value(0.5, Transfer::kSrgb), 1.055 * std::pow(0.5, 1 / 2.4) - 0.055, 1e-15);
  EXPECT_NEAR(transfer_value(0.5, Transfer::kSrgb), 0.7354, 5e-5);
  EXPECT_NEAR(transfer_value(0.002, Transfer::kSrgb), 12.92 * 0.002, 1e-15);
  EXPECT_EQ(transfer_value(0.25, Transfer::kGamma22), std::pow(0.25, 1 / 2.2));
  EXPECT_NEAR(transfer_value(0.25, Transfer::kGamma22), 0.5326, 1e-4);
  EXPECT_EQ(transfer_value(0.37, Transfer::kLinear), 0.37);
}

TEST(RunIsp, Compositions) {
  RawImage flat(12, 12, make_bayer("RGGB"), 0.5);
  for (const auto& p : run_isp(flat, IspConfig{}).planes)
    for (double v : p) EXPECT_NEAR(v, 0.7354, 5e-5);

  const RawImage in = testing::random_raw(12, 12, make_bayer("GRBG"), 6);
  IspConfig linear;
  linear.demosaic = DemosaicKind::kBilinear;
  linear.transfer = Transfer::kLinear;
  EXPECT_EQ(run_isp(in, linear).planes, demosaic_bilinear(in).planes);

  RawImage gray(12, 12, make_bayer("RGGB"), 0.6);
  IspConfig wb = linear;
  wb.wb_gains = {2.0, 1.0, 1.0};
  const PlanarImage out = run_isp(gray, wb, 3);
  for (double v : out.plane(Channel::R)) EXPECT_EQ(v, 1.0);
  for (double v : out.plane(Channel::G)) EXPECT_NEAR(v, 0.6, 1e-15);
  for (double v : out.plane(Channel::B)) EXPECT_NEAR(v, 0.6, 1e-15);

  wb.wb_gains = {0.0, 1.0, 1.0};
  EXPECT_THROW(run_isp(gray, wb), Error);
}

TEST(RunIsp, ThreadInvariant) {
  const RawImage in = testing::random_raw(33, 21, make_bayer("BGGR"), 7);
  EXPECT_EQ(run_isp(in, IspConfig{}, 1).planes, run_isp(in, IspConfig{}, 6).planes);
}

TEST(IspNames, ParseRoundTrip) {
  EXPECT_EQ(parse_demosaic_kind(to_string(DemosaicKind::kMhc)), DemosaicKind::kMhc);
  EXPECT_EQ(parse_demosaic_kind("bilinear"), DemosaicKind::kBilinear);
  EXPECT_EQ(parse_transfer("gamma22"), Transfer::kGamma22);
  EXPECT_THROW(parse_transfer("log"), Error);
}

}  // namespace
}  // namespace rgbw
