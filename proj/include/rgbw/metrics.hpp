// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rgbw/image.hpp"
#include "rgbw/isp.hpp"

namespace rgbw {

inline constexpr double kPsnrCap = 100.0;

/// 10*log10(max^2 / MSE) over all pixels and channels, capped at kPsnrCap.
double psnr(const PlanarImage& a, const PlanarImage& b, double max_val = 1.0);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Gaussian-weighted SSIM averaged over the valid (unpadded) map of each
/// plane, then over the planes.
double ssim(const PlanarImage& a, const PlanarImage& b, const SsimParams& params = {});
double ssim_plane(const std::vector<double>& a, const std::vector<double>& b, int width,
                  int height, const SsimParams& params = {});

struct KldParams {
  int bins = 256;
  double eps = 1e-8;
};

/// Normalized histogram of [0,1] samples into equal-width bins (1.0 lands in
/// the last bin), eps added per bin before normalization.
std::vector<double> histogram_probabilities(const std::vector<double>& values,
                                            const KldParams& params = {});
/// sum p_i ln(p_i / q_i).
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);
/// KL(gt || pred) between the value histograms of two Bayer images.
double kld_bayer(const RawImage& pred, const RawImage& gt, const KldParams& params = {});

/// PSNR * SSIM * 2^(1 - LPIPS - KLD).
double m4(double psnr_db, double ssim_value, double lpips, double kld);

/// Runs `<command> <pathA> <pathB>` and parses one decimal from stdout.
/// Scores are cached per content-hash pair.
class LpipsProvider {
 public:
  explicit LpipsProvider(std::string command,
                         std::chrono::milliseconds timeout = std::chrono::seconds(60));

  /// Throws Error(kProviderFailed / kProviderParse / kProviderTimeout).
  double score(const std::filesystem::path& a, const std::filesystem::path& b);

  const std::string& command() const { return command_; }
  std::size_t invocations() const { return invocations_; }

 private:
  std::string command_;
  std::chrono::milliseconds timeout_;
  std::mutex mutex_;  // one provider process at a time
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> cache_;
  std::size_t invocations_ = 0;
};

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// fork/exec with captured stdout/stderr; kills the child after `timeout`.
ProcessResult run_process(const std::vector<std::string>& argv,
                          std::chrono::milliseconds timeout);

/// 64-bit FNV-1a of a file's bytes.
std::uint64_t file_hash(const std::filesystem::path& path);

struct MetricKnobs {
  SsimParams ssim;
  KldParams kld;
  double lpips_default = 0.0;
};

struct LpipsPolicy {
  /// nullptr -> fixed default, report flagged "lpips-absent".
  LpipsProvider* provider = nullptr;
  /// Scratch directory for the rendered PNGs handed to the provider.
  std::filesystem::path scratch_dir;
};

struct MetricReport {
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> lpips;
  double kld = 0.0;
  double m4 = 0.0;
  std::string lpips_policy;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const;
};

/// Renders both Bayers with the same ISP config and scores them.
MetricReport score_pair(const RawImage& pred_bayer, const RawImage& gt_bayer,
                        const IspConfig& isp_cfg, const LpipsPolicy& lpips_policy = {},
                        const MetricKnobs& knobs = {}, int threads = 1);

}  // namespace rgbw
