// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rgbw/datagen.hpp"
#include "rgbw/metrics.hpp"
#include "rgbw/noise.hpp"
#include "rgbw/remosaic.hpp"

namespace rgbw {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

/// Flat key=value configuration text. '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(const std::string& text);

/// Applies isp.demosaic, isp.transfer and isp.wb (three comma-separated gains).
void apply_isp_config(const ConfigMap& cfg, IspConfig& isp);
/// Applies kld.bins, kld.eps, ssim.window, ssim.sigma and lpips.default.
void apply_metric_config(const ConfigMap& cfg, MetricKnobs& knobs);

// ---------------------------------------------------------------------------
// Datasets

inline const std::vector<std::string> kSplits = {"train", "valid", "test"};
inline const std::vector<int> kChallengeGains = {0, 24, 42};

struct ManifestEntry {
  std::string scene_id;
  std::string split;
  int gain_db = 0;
  std::filesystem::path input;
  std::optional<std::filesystem::path> gt;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  std::vector<std::string> warnings;
};

struct ManifestOptions {
  std::vector<std::string> splits = kSplits;
  std::vector<int> expected_gains = kChallengeGains;
};

/// Scans <root>/<split>/ for RMSC1 files. Entries are sorted by
/// (split, scene, gain). Missing gains or ground truth produce warnings;
/// malformed names, duplicates and scenes present in two splits are errors.
DatasetManifest build_manifest(const std::filesystem::path& root,
                               const ManifestOptions& options = {});

/// Only the entries of one split (and optionally one gain).
DatasetManifest filter_manifest(const DatasetManifest& manifest, const std::string& split,
                                std::optional<int> gain_db = std::nullopt);

struct SyntheticSetOptions {
  int scenes = 10;
  int size = 512;  // pair resolution; captures are twice as large per side
  std::vector<int> gains = kChallengeGains;
  std::uint64_t seed = 2022;
  DemosaicKind demosaic = DemosaicKind::kMhc;
  std::string prefix = "scene";
  int threads = 1;
};

/// Synthetic scene i uses kind all_scene_kinds()[i % 5]. Every scene yields
/// one pair per gain; the ground truth stays clean.
std::vector<PairSample> make_synthetic_pairs(const SyntheticSetOptions& options,
                                             const NoiseRegistry& noise);

/// Noise seed used for (seed, scene index, gain) in synthetic sets.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Writes pairs in the dataset layout. Ground truth is written once per scene.
void write_dataset(const std::filesystem::path& root, const std::string& split,
                   const std::vector<PairSample>& pairs, const QuantLevels& levels = {});

/// Loads (input, gt) pairs of a manifest; entries without ground truth are skipped.
std::vector<PairSample> load_pairs(const DatasetManifest& manifest);

// ---------------------------------------------------------------------------
// Algorithms

enum class AlgorithmKind { kIdentity, kNearest, kWhiteGuided, kFilterBank };

std::string to_string(AlgorithmKind kind);
AlgorithmKind parse_algorithm(std::string_view name);

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::kWhiteGuided;
  CfaDescriptor cfa_out = make_bayer("RGGB");
  /// Filter banks per gain; `fallback_bank` serves gains without their own.
  std::map<int, FilterBank> banks;
  std::optional<FilterBank> fallback_bank;
  /// Free-form provenance echoed into reports (e.g. bank file paths).
  std::map<std::string, std::string> params;
};

/// Identity relabels the input samples under cfa_out.
RawImage run_algorithm(const AlgorithmSpec& spec, const RawImage& input, int gain_db,
                       int threads = 1);

// ---------------------------------------------------------------------------
// Evaluation

struct ImageResult {
  std::string scene_id;
  std::string split;
  int gain_db = 0;
  std::optional<MetricReport> metrics;
  std::string error;
};

struct DatasetReport {
  std::vector<ImageResult> images;
  std::size_t failures = 0;
  std::size_t skipped = 0;  // entries without ground truth
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> lpips;
  double kld = 0.0;
  double m4_of_means = 0.0;
  double mean_of_m4 = 0.0;
  std::string lpips_policy;
  std::vector<std::string> flags;
  Json config;
  std::string timestamp;
};

struct EvaluateOptions {
  int threads = 1;
  LpipsPolicy lpips;
};

/// Scores every entry with ground truth, in manifest order. Per-image
/// failures are recorded and the run continues.
DatasetReport evaluate(const DatasetManifest& manifest, const AlgorithmSpec& algorithm,
                       const IspConfig& isp_cfg, const MetricKnobs& knobs,
                       const EvaluateOptions& options = {});

/// Report serialization. The "timestamp" member is the only field that
/// differs between identical runs.
Json to_json(const DatasetReport& report);
Json to_json(const MetricReport& report);
/// Report text with the timestamp removed, for byte comparison.
std::string deterministic_dump(const DatasetReport& report);

// ---------------------------------------------------------------------------
// Runtime

struct RuntimeReport {
  int width = 0;
  int height = 0;
  int repeats = 0;
  int threads_multi = 1;
  double median_single_s = 0.0;
  double median_multi_s = 0.0;
  double estimate_64m_single_s = 0.0;
  double estimate_64m_multi_s = 0.0;
};

using RemosaicFn = std::function<RawImage(const RawImage&, int threads)>;

/// Median wall-clock seconds over `repeats` runs after one warm-up.
/// Throws Error(kInvalidArgument) when repeats < 3.
double measure_median_seconds(const std::function<void()>& fn, int repeats = 5);

/// Single-threaded and multi-threaded medians plus their 64-megapixel estimates.
RuntimeReport measure_runtime(const RemosaicFn& algorithm, const RawImage& input,
                              int repeats = 5, int threads = 0);

inline constexpr double kSixtyFourMegapixels = 64e6;

/// measured_s * 64e6 / (width * height).
double estimate_64m_runtime(double measured_s, long long width, long long height);

Json to_json(const RuntimeReport& report);

// ---------------------------------------------------------------------------
// Leaderboard

enum class M4Mode { kMeanOfM4, kM4OfMeans };
std::string to_string(M4Mode mode);
M4Mode parse_m4_mode(std::string_view name);

struct LeaderboardRow {
  std::string name;
  double psnr = 0.0;
  double ssim = 0.0;
  double lpips = 0.0;
  double kld = 0.0;
  double m4_of_means = 0.0;
  double mean_of_m4 = 0.0;
  std::optional<double> runtime_s;
  std::optional<double> runtime_64m_s;

  double m4(M4Mode mode) const { return mode == M4Mode::kMeanOfM4 ? mean_of_m4 : m4_of_means; }
};

/// Row whose m4_of_means is recomputed from its averages; mean_of_m4 defaults
/// to the same value when unknown.
LeaderboardRow make_leaderboard_row(std::string name, double psnr, double ssim, double lpips,
                                    double kld, std::optional<double> mean_of_m4 = std::nullopt);
LeaderboardRow leaderboard_row(const std::string& name, const DatasetReport& report);
LeaderboardRow leaderboard_row_from_json(const std::string& name, const Json& report);

/// Descending by the chosen m4; ties by psnr (descending) then name.
std::vector<LeaderboardRow> rank_leaderboard(std::vector<LeaderboardRow> rows, M4Mode mode);
std::string render_leaderboard(const std::vector<LeaderboardRow>& ranked, M4Mode mode);
Json leaderboard_json(const std::vector<LeaderboardRow>& ranked, M4Mode mode);

}  // namespace rgbw
