// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "rgbw/cfa.hpp"
#include "rgbw/datagen.hpp"
#include "rgbw/harness.hpp"
#include "rgbw/isp.hpp"
#include "rgbw/metrics.hpp"
#include "rgbw/noise.hpp"
#include "rgbw/parallel.hpp"
#include "rgbw/remosaic.hpp"
#include "test_util.hpp"

using namespace rgbw;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << "[exception: " << e.what() << "] ";
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  out.require(elapsed <= budget_s, "time budget " + std::to_string(budget_s) + " s");
  if (!out.pass) ++g_failures;
  std::printf("%s %-34s %8.2fs  %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), elapsed,
              out.detail.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void m4_consistency(Outcome& o) {
  struct Row {
    const char* team;
    double psnr, ssim, lpips, kld, expected;
  };
  const Row rows[] = {{"op-summer-po", 36.83, 0.957, 0.115, 0.018, 64.29},
                      {"HIT-IIL", 36.34, 0.95, 0.129, 0.02, 62.28},
                      {"Eating, Drinking, and Playing", 36.77, 0.957, 0.132, 0.019, 63.40}};
  for (const Row& r : rows) {
    const double v = m4(r.psnr, r.ssim, r.lpips, r.kld);
    o.detail << r.team << "=" << fmt(v) << " (want " << fmt(r.expected, 2) << "±0.01) ";
    o.require(std::abs(v - r.expected) <= 0.01, r.team);
  }
}

void runtime_estimates(Outcome& o) {
  const double measured[] = {6.2, 4.1, 10.4};
  const double printed[] = {184.0, 121.5, 308.0};
  for (int i = 0; i < 3; ++i) {
    const double est = estimate_64m_runtime(measured[i], 1200, 1800);
    o.detail << measured[i] << "s->" << fmt(est, 2) << "s ";
    o.require(std::abs(est - printed[i]) <= 0.5, "estimate " + std::to_string(printed[i]));
  }
}

void pipeline_dimensions(Outcome& o) {
  const RawImage capture =
      mosaic(generate_synthetic_scene(SceneKind::kSlantedEdge, 2400, 3600, 2022),
             make_rgbw_default());
  const auto t0 = Clock::now();
  const PairSample pair = generate_pair(capture, {}, "capture");
  const double t = std::chrono::duration<double>(Clock::now() - t0).count();
  const RawImage& in = pair.input_rgbw;
  const RawImage& gt = pair.gt_bayer;
  o.detail << "pair " << in.width << "x" << in.height << " / " << gt.width << "x" << gt.height
           << " in " << fmt(t, 2) << "s ";
  o.require(in.width == 1200 && in.height == 1800, "input size");
  o.require(gt.width == 1200 && gt.height == 1800, "gt size");
  o.require(in.cfa == make_rgbw_default(), "input descriptor");
  o.require(gt.cfa == binned_bayer_descriptor(in.cfa), "gt phase matches binned input phase");

  // W sites carry the binned white; shared color sites carry the same value.
  const auto ref = oracle::diagonal_bin(capture);
  std::size_t w_bad = 0, c_bad = 0, shared = 0;
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const std::size_t i = in.index(x, y);
      if (in.channel(x, y) == Channel::W) {
        w_bad += in.data[i] != ref.white[i];
      } else if (in.channel(x, y) == gt.channel(x, y)) {
        ++shared;
        c_bad += in.data[i] != gt.data[i];
      }
    }
  }
  o.detail << "shared-site mismatches " << c_bad << "/" << shared;
  o.require(w_bad == 0, "W sites equal binned white");
  o.require(c_bad == 0 && shared > 0, "input and gt aligned");
}

void oracle_suite(Outcome& o) {
  // mosaic / expand round trip
  const RawImage raw = testing::random_raw(32, 32, make_rgbw_default(), 1);
  o.require(mosaic(expand_cfa_channels(raw), raw.cfa).data == raw.data, "expand/mosaic round trip");
  const PlanarImage planes =
      testing::random_planar(32, 32, {Channel::W, Channel::G, Channel::B, Channel::R}, 2);
  const RawImage m = mosaic(planes, make_rgbw_default());
  const PlanarImage e = expand_cfa_channels(m);
  bool expand_ok = true;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      expand_ok = expand_ok && e.plane(m.channel(x, y))[m.index(x, y)] ==
                                   planes.plane(m.channel(x, y))[m.index(x, y)];
  o.require(expand_ok, "expand keeps mosaiced samples");

  const auto bin = diagonal_bin(raw);
  const auto ref = oracle::diagonal_bin(raw);
  o.require(bin.dbinc.data == ref.white && bin.dbinb.data == ref.color, "diagonal_bin exact");

  const PlanarImage a = testing::random_rgb(32, 32, 3);
  const PlanarImage b = testing::random_rgb(32, 32, 4);
  const double dp = std::abs(psnr(a, b) - oracle::psnr(a, b));
  const double ds = std::abs(ssim(a, b) - oracle::ssim(a, b));
  const RawImage ka = testing::random_raw(32, 32, make_bayer("RGGB"), 5);
  const RawImage kb = testing::random_raw(32, 32, make_bayer("RGGB"), 6);
  const double dk = std::abs(kld_bayer(ka, kb) - oracle::kld(ka.data, kb.data));
  o.detail << "psnr " << dp << " ssim " << ds << " kld " << dk << " ";
  o.require(dp <= 1e-8 && ds <= 1e-8 && dk <= 1e-8, "metric oracles within 1e-8");

  double worst = 0.0;
  for (const char* phase : {"RGGB", "GRBG", "GBRG", "BGGR"}) {
    const RawImage ramp = testing::gray_raw(32, 32, make_bayer(phase), [](int x, int y) {
      return 0.2 + 0.017 * x + 0.009 * y;
    });
    const PlanarImage rgb = demosaic_mhc(ramp);
    for (int y = 2; y < 30; ++y)
      for (int x = 2; x < 30; ++x)
        for (const auto& p : rgb.planes)
          worst = std::max(worst, std::abs(p[ramp.index(x, y)] - ramp.at(x, y)));
  }
  o.detail << "mhc affine " << worst;
  o.require(worst <= 1e-12, "mhc exact on affine");
}

void noise_consistency(Outcome& o) {
  const NoiseRegistry registry = NoiseRegistry::with_defaults();
  double worst = 0.0;
  for (int gain : {0, 24, 42}) {
    const NoiseProfile p = registry.profile_for_gain(gain);
    for (double x : {0.3, 0.5, 0.7}) {
      const RawImage flat(1000, 1000, make_rgbw_default(), x);
      const RawImage noisy = synthesize_noise(flat, p, 17 + gain, 2);
      double sum = 0.0, sq = 0.0;
      for (double v : noisy.data) {
        sum += v - x;
        sq += (v - x) * (v - x);
      }
      const double n = static_cast<double>(noisy.data.size());
      const double var = sq / n - (sum / n) * (sum / n);
      const double rel = std::abs(var / noise_variance(p, x) - 1.0);
      worst = std::max(worst, rel);
      o.require(rel <= 0.02, "variance at " + std::to_string(gain) + " dB, x=" + fmt(x, 1));
    }
  }
  o.detail << "worst relative variance error " << fmt(100 * worst, 3) << "% ";
  const RawImage img = testing::random_raw(257, 131, make_rgbw_default(), 8);
  const NoiseProfile p42 = registry.profile_for_gain(42);
  const auto one = synthesize_noise(img, p42, 99, 1).data;
  bool same = true;
  for (int t : {2, 3, 8}) same = same && synthesize_noise(img, p42, 99, t).data == one;
  o.detail << "threads 1/2/3/8 " << (same ? "bit-identical" : "differ");
  o.require(same, "thread-count determinism");
}

void algorithm_ordering(Outcome& o) {
  testing::TempDir dir("acceptance");
  const NoiseRegistry registry = NoiseRegistry::with_defaults();
  SyntheticSetOptions valid;
  valid.prefix = "valid";
  write_dataset(dir.path(), "valid", make_synthetic_pairs(valid, registry));
  SyntheticSetOptions train = valid;
  train.seed = 7;
  train.prefix = "train";
  write_dataset(dir.path(), "train", make_synthetic_pairs(train, registry));
  const DatasetManifest manifest = build_manifest(dir.path());
  o.require(manifest.warnings.empty(), "complete dataset");

  AlgorithmSpec nearest;
  nearest.kind = AlgorithmKind::kNearest;
  AlgorithmSpec guided;
  guided.kind = AlgorithmKind::kWhiteGuided;
  AlgorithmSpec bank;
  bank.kind = AlgorithmKind::kFilterBank;
  double worst_residual = 0.0;
  for (int gain : kChallengeGains) {
    const auto pairs = load_pairs(filter_manifest(manifest, "train", gain));
    FilterBank fb = train_filter_bank(pairs, 2, 1e-4, default_threads());
    for (const auto& f : fb.fits) worst_residual = std::max(worst_residual, f.relative_residual);
    bank.banks[gain] = std::move(fb);
  }
  o.detail << "bank residual " << worst_residual << " | ";
  o.require(worst_residual <= kRidgeResidualBound, "normal-equation residual bound");

  EvaluateOptions opts;
  opts.threads = default_threads();
  for (int gain : kChallengeGains) {
    const DatasetManifest split = filter_manifest(manifest, "valid", gain);
    o.require(split.entries.size() == 10, "10 validation scenes at " + std::to_string(gain) + " dB");
    const double pn = evaluate(split, nearest, IspConfig{}, {}, opts).psnr;
    const double pw = evaluate(split, guided, IspConfig{}, {}, opts).psnr;
    const double pb = evaluate(split, bank, IspConfig{}, {}, opts).psnr;
    o.detail << gain << "dB nearest " << fmt(pn, 2) << " guided " << fmt(pw, 2) << " bank "
             << fmt(pb, 2) << " | ";
    if (gain == 0) o.require(pw - pn >= 1.0, "white-guided >= nearest + 1 dB at 0 dB");
    o.require(pb >= pn, "bank >= nearest at " + std::to_string(gain) + " dB");
  }
}

void ridge_recovery(Outcome& o) {
  const double kernel[9] = {0.05, -0.1, 0.15, 0.2, 0.4, 0.1, -0.05, 0.15, 0.1};
  const CfaDescriptor rgbw = make_rgbw_default();
  std::vector<PairSample> pairs;
  for (std::uint64_t s = 0; s < 4; ++s) {
    PairSample p;
    p.input_rgbw = testing::random_raw(64, 64, rgbw, 300 + s);
    p.gt_bayer = RawImage(64, 64, make_bayer("RGGB"));
    for (int y = 1; y < 63; ++y)
      for (int x = 1; x < 63; ++x) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            acc += kernel[(dy + 1) * 3 + dx + 1] * p.input_rgbw.at(x + dx, y + dy);
        p.gt_bayer.at(x, y) = acc;
      }
    pairs.push_back(std::move(p));
  }
  const double lambda = 1e-12;
  const FilterBank bank = train_filter_bank(pairs, 1, lambda, default_threads());
  const auto eqs = accumulate_normal_equations(pairs, 1, 1);
  double tap_err = 0.0, pinv_err = 0.0;
  for (std::size_t p = 0; p < eqs.size(); ++p) {
    Eigen::MatrixXd a(9, 9);
    Eigen::VectorXd b(9);
    for (int r = 0; r < 9; ++r) {
      b(r) = eqs[p].rhs[static_cast<std::size_t>(r)];
      for (int c = 0; c < 9; ++c) a(r, c) = eqs[p].gram(r, c) + (r == c ? lambda : 0.0);
    }
    const Eigen::VectorXd w = a.completeOrthogonalDecomposition().pseudoInverse() * b;
    for (int t = 0; t < 9; ++t) {
      const double got = bank.weights[p][static_cast<std::size_t>(t)];
      tap_err = std::max(tap_err, std::abs(got - kernel[t]));
      pinv_err = std::max(pinv_err, std::abs(got - w(t)));
    }
  }
  o.detail << "max tap error " << tap_err << ", vs pseudo-inverse " << pinv_err;
  o.require(tap_err <= 1e-6, "taps within 1e-6");
  o.require(pinv_err <= 1e-6, "matches pseudo-inverse oracle");
}

void evaluate_determinism(Outcome& o) {
  testing::TempDir dir("determinism");
  SyntheticSetOptions opts;
  opts.scenes = 4;
  opts.size = 128;
  write_dataset(dir.path(), "valid", make_synthetic_pairs(opts, NoiseRegistry::with_defaults()));
  const DatasetManifest manifest = build_manifest(dir.path());
  AlgorithmSpec spec;
  const std::string first = deterministic_dump(evaluate(manifest, spec, IspConfig{}, {}, {1, {}}));
  const std::string second =
      deterministic_dump(evaluate(build_manifest(dir.path()), spec, IspConfig{}, {}, {4, {}}));
  o.detail << first.size() << " bytes, " << (first == second ? "identical" : "different");
  o.require(first == second, "byte-identical reports");
}

}  // namespace

int main() {
  criterion("M4 formula consistency", 1, m4_consistency);
  criterion("64M runtime estimation rule", 1, runtime_estimates);
  criterion("Pipeline dimensional claim", 10, pipeline_dimensions);
  criterion("Oracle equivalence suite", 30, oracle_suite);
  criterion("Noise-model consistency", 60, noise_consistency);
  criterion("Algorithm ordering", 600, algorithm_ordering);
  criterion("Ridge recovery", 60, ridge_recovery);
  criterion("Determinism", 120, evaluate_determinism);
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
