// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/metrics.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rgbw/error.hpp"
#include "rgbw/raw_io.hpp"

namespace rgbw {
namespace {

void check_same_shape(const PlanarImage& a, const PlanarImage& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw Error(ErrorCode::kDimensionMismatch,
                "images differ in size or channels: " + std::to_string(a.width) + "x" +
                    std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                    std::to_string(b.height));
  }
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> g(static_cast<std::size_t>(size));
  const double c = 0.5 * (size - 1);
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - c;
    g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += g[static_cast<std::size_t>(i)];
  }
  for (double& v : g) v /= sum;
  return g;
}

}  // namespace

double psnr(const PlanarImage& a, const PlanarImage& b, double max_val) {
  check_same_shape(a, b);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < a.planes.size(); ++c) {
    const auto& pa = a.planes[c];
    const auto& pb = b.planes[c];
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const double d = pa[i] - pb[i];
      sum += d * d;
    }
    count += pa.size();
  }
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "empty images");
  const double mse = sum / static_cast<double>(count);
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(max_val * max_val / mse));
}

double ssim_plane(const std::vector<double>& a, const std::vector<double>& b, int width,
                  int height, const SsimParams& params) {
  const int win = params.window;
  if (width < win || height < win) {
    throw Error(ErrorCode::kInvalidArgument, "image smaller than the SSIM window");
  }
  const auto g = gaussian_window(win, params.sigma);
  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
  const int ow = width - win + 1;
  const int oh = height - win + 1;

  // Horizontal pass over every row for the five moment images.
  const std::size_t hsize = static_cast<std::size_t>(ow) * height;
  std::vector<double> ha(hsize), hb(hsize), haa(hsize), hbb(hsize), hab(hsize);
  for (int y = 0; y < height; ++y) {
    const double* ra = &a[static_cast<std::size_t>(y) * width];
    const double* rb = &b[static_cast<std::size_t>(y) * width];
    for (int x = 0; x < ow; ++x) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int k = 0; k < win; ++k) {
        const double w = g[static_cast<std::size_t>(k)];
        const double va = ra[x + k];
        const double vb = rb[x + k];
        sa += w * va;
        sb += w * vb;
        saa += w * (va * va);
        sbb += w * (vb * vb);
        sab += w * (va * vb);
      }
      const std::size_t i = static_cast<std::size_t>(y) * ow + x;
      ha[i] = sa;
      hb[i] = sb;
      haa[i] = saa;
      hbb[i] = sbb;
      hab[i] = sab;
    }
  }
  double total = 0.0;
  for (int y = 0; y < oh; ++y) {
    double row_total = 0.0;
    for (int x = 0; x < ow; ++x) {
      double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
      for (int k = 0; k < win; ++k) {
        const double w = g[static_cast<std::size_t>(k)];
        const std::size_t i = static_cast<std::size_t>(y + k) * ow + x;
        ma += w * ha[i];
        mb += w * hb[i];
        maa += w * haa[i];
        mbb += w * hbb[i];
        mab += w * hab[i];
      }
      const double va = maa - ma * ma;
      const double vb = mbb - mb * mb;
      const double cov = mab - ma * mb;
      const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
      const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
      row_total += num / den;
    }
    total += row_total;
  }
  return total / (static_cast<double>(ow) * oh);
}

double ssim(const PlanarImage& a, const PlanarImage& b, const SsimParams& params) {
  check_same_shape(a, b);
  if (a.planes.empty()) throw Error(ErrorCode::kInvalidArgument, "empty images");
  double sum = 0.0;
  for (std::size_t c = 0; c < a.planes.size(); ++c) {
    sum += ssim_plane(a.planes[c], b.planes[c], a.width, a.height, params);
  }
  return sum / static_cast<double>(a.planes.size());
}

std::vector<double> histogram_probabilities(const std::vector<double>& values,
                                            const KldParams& params) {
  if (params.bins < 1 || !(params.eps >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "KLD needs bins >= 1 and eps >= 0");
  }
  std::vector<double> counts(static_cast<std::size_t>(params.bins), 0.0);
  for (double v : values) {
    const double c = std::clamp(v, 0.0, 1.0);
    const int bin = std::min(params.bins - 1, static_cast<int>(c * params.bins));
    counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  double total = 0.0;
  for (double& c : counts) {
    c += params.eps;
    total += c;
  }
  for (double& c : counts) c /= total;
  return counts;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kDimensionMismatch, "histogram sizes differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, sum);
}

double kld_bayer(const RawImage& pred, const RawImage& gt, const KldParams& params) {
  if (pred.width != gt.width || pred.height != gt.height) {
    throw Error(ErrorCode::kDimensionMismatch, "Bayer images differ in size");
  }
  return kl_divergence(histogram_probabilities(gt.data, params),
                       histogram_probabilities(pred.data, params));
}

double m4(double psnr_db, double ssim_value, double lpips, double kld) {
  return psnr_db * ssim_value * std::exp2(1.0 - lpips - kld);
}

std::uint64_t file_hash(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

ProcessResult run_process(const std::vector<std::string>& argv,
                          std::chrono::milliseconds timeout) {
  if (argv.empty()) throw Error(ErrorCode::kInvalidArgument, "empty command");
  int out_pipe[2];
  int err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    throw Error(ErrorCode::kIo, std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::kIo, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    execvp(args[0], args.data());
    const char msg[] = "exec failed\n";
    [[maybe_unused]] auto n = write(STDERR_FILENO, msg, sizeof(msg) - 1);
    _exit(127);
  }
  close(out_pipe[1]);
  close(err_pipe[1]);

  ProcessResult result;
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&result.out, &result.err};
  int open_fds = 2;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  while (open_fds > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      kill(pid, SIGKILL);
      break;
    }
    const int ready = poll(fds, 2, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = read(fds[i].fd, buf, sizeof(buf));
      if (n > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(n));
      } else {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) close(f.fd);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else {
    result.exit_code = -1;
  }
  return result;
}

LpipsProvider::LpipsProvider(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

double LpipsProvider::score(const std::filesystem::path& a, const std::filesystem::path& b) {
  const auto key = std::make_pair(file_hash(a), file_hash(b));
  std::lock_guard lock(mutex_);
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;

  // The command may carry its own arguments, e.g. "python3 provider.py".
  std::vector<std::string> argv;
  std::istringstream words(command_);
  for (std::string w; words >> w;) argv.push_back(w);
  argv.push_back(a.string());
  argv.push_back(b.string());
  ++invocations_;
  const ProcessResult res = run_process(argv, timeout_);
  if (res.timed_out) {
    throw Error(ErrorCode::kProviderTimeout,
                "LPIPS provider timed out after " + std::to_string(timeout_.count()) + " ms");
  }
  if (res.exit_code != 0) {
    throw Error(ErrorCode::kProviderFailed, "LPIPS provider exited with " +
                                                std::to_string(res.exit_code) +
                                                "; stderr: " + res.err);
  }
  std::istringstream in(res.out);
  double value = 0.0;
  std::string rest;
  if (!(in >> value) || (in >> rest) || !std::isfinite(value)) {
    throw Error(ErrorCode::kProviderParse, "LPIPS provider printed '" + res.out +
                                               "'; stderr: " + res.err);
  }
  cache_[key] = value;
  return value;
}

bool MetricReport::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

MetricReport score_pair(const RawImage& pred_bayer, const RawImage& gt_bayer,
                        const IspConfig& isp_cfg, const LpipsPolicy& lpips_policy,
                        const MetricKnobs& knobs, int threads) {
  if (pred_bayer.width != gt_bayer.width || pred_bayer.height != gt_bayer.height) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction and ground truth differ in size");
  }
  if (pred_bayer.cfa != gt_bayer.cfa) {
    throw Error(ErrorCode::kDescriptorMismatch, "prediction is " + pred_bayer.cfa.name +
                                                    " but ground truth is " + gt_bayer.cfa.name);
  }
  const PlanarImage pred_rgb = run_isp(pred_bayer, isp_cfg, threads);
  const PlanarImage gt_rgb = run_isp(gt_bayer, isp_cfg, threads);

  MetricReport report;
  report.psnr = psnr(pred_rgb, gt_rgb);
  report.ssim = ssim(pred_rgb, gt_rgb, knobs.ssim);
  report.kld = kld_bayer(pred_bayer, gt_bayer, knobs.kld);
  if (report.psnr >= kPsnrCap) report.flags.push_back("psnr-capped");

  double lpips_value = knobs.lpips_default;
  if (lpips_policy.provider != nullptr) {
    static std::atomic<unsigned> counter{0};
    const auto dir = lpips_policy.scratch_dir.empty() ? std::filesystem::temp_directory_path()
                                                      : lpips_policy.scratch_dir;
    std::filesystem::create_directories(dir);
    const std::string stem = "lpips_" + std::to_string(getpid()) + "_" +
                             std::to_string(counter.fetch_add(1));
    const auto pa = dir / (stem + "_pred.png");
    const auto pb = dir / (stem + "_gt.png");
    write_file(pa, write_rgb_png(pred_rgb));
    write_file(pb, write_rgb_png(gt_rgb));
    try {
      lpips_value = lpips_policy.provider->score(pa, pb);
    } catch (...) {
      std::filesystem::remove(pa);
      std::filesystem::remove(pb);
      throw;
    }
    std::filesystem::remove(pa);
    std::filesystem::remove(pb);
    report.lpips = lpips_value;
    report.lpips_policy = "external:" + lpips_policy.provider->command();
  } else {
    report.lpips_policy = "default";
    report.flags.push_back("lpips-absent");
  }
  report.m4 = m4(report.psnr, report.ssim, lpips_value, report.kld);
  return report;
}

}  // namespace rgbw
