// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>

#include "rgbw/error.hpp"
#include "rgbw/parallel.hpp"

namespace rgbw {
namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::kInvalidArgument, "config key " + key + " expects a number, got " + value);
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v)) {
    throw Error(ErrorCode::kInvalidArgument, "config key " + key + " expects an integer");
  }
  return static_cast<int>(v);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + " is not key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_isp_config(const ConfigMap& cfg, IspConfig& isp) {
  if (auto it = cfg.find("isp.demosaic"); it != cfg.end()) isp.demosaic = parse_demosaic_kind(it->second);
  if (auto it = cfg.find("isp.transfer"); it != cfg.end()) isp.transfer = parse_transfer(it->second);
  if (auto it = cfg.find("isp.wb"); it != cfg.end()) {
    std::istringstream in(it->second);
    std::string part;
    std::vector<double> gains;
    while (std::getline(in, part, ',')) gains.push_back(to_double("isp.wb", trim(part)));
    if (gains.size() != 3) throw Error(ErrorCode::kInvalidArgument, "isp.wb expects three gains");
    isp.wb_gains = {gains[0], gains[1], gains[2]};
  }
  validate(isp);
}

void apply_metric_config(const ConfigMap& cfg, MetricKnobs& knobs) {
  if (auto it = cfg.find("kld.bins"); it != cfg.end()) knobs.kld.bins = to_int(it->first, it->second);
  if (auto it = cfg.find("kld.eps"); it != cfg.end()) knobs.kld.eps = to_double(it->first, it->second);
  if (auto it = cfg.find("ssim.window"); it != cfg.end()) knobs.ssim.window = to_int(it->first, it->second);
  if (auto it = cfg.find("ssim.sigma"); it != cfg.end()) knobs.ssim.sigma = to_double(it->first, it->second);
  if (auto it = cfg.find("lpips.default"); it != cfg.end()) {
    knobs.lpips_default = to_double(it->first, it->second);
  }
}

// ---------------------------------------------------------------------------

DatasetManifest build_manifest(const fs::path& root, const ManifestOptions& options) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::kEmptyDataset, "dataset root " + root.string() + " does not exist");
  }
  DatasetManifest manifest;
  manifest.root = root;
  std::vector<std::string> malformed;
  std::map<std::string, std::string> scene_split;
  std::map<std::pair<std::string, std::string>, fs::path> gts;
  std::map<std::tuple<std::string, std::string, int>, fs::path> inputs;
  std::vector<std::string> duplicates;

  for (const auto& split : options.splits) {
    const fs::path dir = root / split;
    if (!fs::is_directory(dir)) continue;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".rmsc") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      const auto parsed = parse_dataset_filename(file.filename().string());
      if (!parsed) {
        malformed.push_back((fs::path(split) / file.filename()).string());
        continue;
      }
      const auto [it, fresh] = scene_split.emplace(parsed->scene, split);
      if (!fresh && it->second != split) {
        duplicates.push_back("scene " + parsed->scene + " appears in splits " + it->second +
                             " and " + split);
        continue;
      }
      if (!parsed->gain_db) {
        gts[{split, parsed->scene}] = file;
        continue;
      }
      const auto key = std::make_tuple(split, parsed->scene, *parsed->gain_db);
      if (const auto [slot, inserted] = inputs.emplace(key, file); !inserted) {
        duplicates.push_back("scene " + parsed->scene + " has two files at " +
                             std::to_string(*parsed->gain_db) + " dB: " +
                             slot->second.filename().string() + ", " +
                             file.filename().string());
      }
    }
  }
  if (!malformed.empty()) {
    std::string msg = "malformed dataset file names:";
    for (const auto& m : malformed) msg += "\n  " + m;
    throw Error(ErrorCode::kMalformedDataset, msg);
  }
  if (!duplicates.empty()) {
    std::string msg = "duplicate dataset entries:";
    for (const auto& d : duplicates) msg += "\n  " + d;
    throw Error(ErrorCode::kDuplicateEntry, msg);
  }
  if (inputs.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no input files under " + root.string());
  }

  std::map<std::pair<std::string, std::string>, std::set<int>> gains_seen;
  for (const auto& [key, path] : inputs) {
    const auto& [split, scene, gain] = key;
    ManifestEntry e{scene, split, gain, path, std::nullopt};
    if (const auto gt = gts.find({split, scene}); gt != gts.end()) e.gt = gt->second;
    gains_seen[{split, scene}].insert(gain);
    manifest.entries.push_back(std::move(e));
  }
  // Entries follow the split order of the options, then scene, then gain.
  auto split_rank = [&](const std::string& s) {
    return std::find(options.splits.begin(), options.splits.end(), s) - options.splits.begin();
  };
  std::stable_sort(manifest.entries.begin(), manifest.entries.end(),
                   [&](const ManifestEntry& a, const ManifestEntry& b) {
                     if (a.split != b.split) return split_rank(a.split) < split_rank(b.split);
                     if (a.scene_id != b.scene_id) return a.scene_id < b.scene_id;
                     return a.gain_db < b.gain_db;
                   });
  for (const auto& [key, gains] : gains_seen) {
    for (int g : options.expected_gains) {
      if (!gains.count(g)) {
        manifest.warnings.push_back("scene " + key.second + " (" + key.first + ") lacks the " +
                                    std::to_string(g) + " dB input");
      }
    }
    if (key.first != "test" && !gts.count(key)) {
      manifest.warnings.push_back("scene " + key.second + " (" + key.first +
                                  ") has no ground truth");
    }
  }
  return manifest;
}

DatasetManifest filter_manifest(const DatasetManifest& manifest, const std::string& split,
                                std::optional<int> gain_db) {
  DatasetManifest out;
  out.root = manifest.root;
  out.warnings = manifest.warnings;
  for (const auto& e : manifest.entries) {
    if (e.split == split && (!gain_db || e.gain_db == *gain_db)) out.entries.push_back(e);
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

std::vector<PairSample> make_synthetic_pairs(const SyntheticSetOptions& options,
                                             const NoiseRegistry& noise) {
  if (options.scenes < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one scene");
  if (options.size < 16 || options.size % 4 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "pair size must be a multiple of 4 and >= 16");
  }
  const auto& kinds = all_scene_kinds();
  const CfaDescriptor rgbw_cfa = make_rgbw_default();
  std::vector<PairSample> out;
  for (int s = 0; s < options.scenes; ++s) {
    const SceneKind kind = kinds[static_cast<std::size_t>(s) % kinds.size()];
    std::ostringstream id;
    id << options.prefix << std::setw(3) << std::setfill('0') << s;
    const PlanarImage scene = generate_synthetic_scene(
        kind, 2 * options.size, 2 * options.size,
        derive_seed(options.seed, static_cast<std::uint64_t>(s), 0x5ce7e));
    const RawImage capture = mosaic(scene, rgbw_cfa);
    PairOptions pair_opts;
    pair_opts.demosaic = options.demosaic;
    pair_opts.threads = options.threads;
    const PairSample clean = generate_pair(capture, pair_opts, id.str());
    for (int gain : options.gains) {
      PairSample p = clean;
      p.gain_db = gain;
      const NoiseProfile profile = noise.profile_for_gain(gain);
      p.input_rgbw = synthesize_noise(clean.input_rgbw, profile,
                                      derive_seed(options.seed, static_cast<std::uint64_t>(s),
                                                  static_cast<std::uint64_t>(gain) + 1),
                                      options.threads);
      out.push_back(std::move(p));
    }
  }
  return out;
}

void write_dataset(const fs::path& root, const std::string& split,
                   const std::vector<PairSample>& pairs, const QuantLevels& levels) {
  std::set<std::string> gt_written;
  for (const auto& p : pairs) {
    save_raw(input_path(root, split, p.scene_id, p.gain_db), p.input_rgbw, levels);
    if (gt_written.insert(p.scene_id).second) {
      save_raw(gt_path(root, split, p.scene_id), p.gt_bayer, levels);
    }
  }
}

std::vector<PairSample> load_pairs(const DatasetManifest& manifest) {
  const CfaRegistry registry = CfaRegistry::with_defaults();
  std::vector<PairSample> out;
  std::map<fs::path, RawImage> gt_cache;
  for (const auto& e : manifest.entries) {
    if (!e.gt) continue;
    auto it = gt_cache.find(*e.gt);
    if (it == gt_cache.end()) it = gt_cache.emplace(*e.gt, load_raw(*e.gt, registry)).first;
    out.push_back(PairSample{load_raw(e.input, registry), it->second, e.scene_id, e.gain_db});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kIdentity: return "identity";
    case AlgorithmKind::kNearest: return "nearest";
    case AlgorithmKind::kWhiteGuided: return "white-guided";
    case AlgorithmKind::kFilterBank: return "filter-bank";
  }
  return "unknown";
}

AlgorithmKind parse_algorithm(std::string_view name) {
  for (auto k : {AlgorithmKind::kIdentity, AlgorithmKind::kNearest, AlgorithmKind::kWhiteGuided,
                 AlgorithmKind::kFilterBank}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kUnknownKind, "unknown algorithm: " + std::string(name));
}

RawImage run_algorithm(const AlgorithmSpec& spec, const RawImage& input, int gain_db,
                       int threads) {
  switch (spec.kind) {
    case AlgorithmKind::kIdentity: {
      RawImage out = input;
      out.cfa = spec.cfa_out;
      return out;
    }
    case AlgorithmKind::kNearest:
      return remosaic_nearest(input, spec.cfa_out, threads);
    case AlgorithmKind::kWhiteGuided:
      return remosaic_white_guided(input, spec.cfa_out, threads);
    case AlgorithmKind::kFilterBank: {
      if (const auto it = spec.banks.find(gain_db); it != spec.banks.end()) {
        return apply_filter_bank(input, it->second, threads);
      }
      if (spec.fallback_bank) return apply_filter_bank(input, *spec.fallback_bank, threads);
      throw Error(ErrorCode::kInvalidArgument,
                  "no filter bank for " + std::to_string(gain_db) + " dB");
    }
  }
  throw Error(ErrorCode::kUnknownKind, "unknown algorithm");
}

// ---------------------------------------------------------------------------

Json to_json(const MetricReport& r) {
  Json j;
  j["psnr"] = r.psnr;
  j["ssim"] = r.ssim;
  j["lpips"] = r.lpips ? Json(*r.lpips) : Json(nullptr);
  j["kld"] = r.kld;
  j["m4"] = r.m4;
  j["lpips_policy"] = r.lpips_policy;
  j["flags"] = r.flags;
  return j;
}

DatasetReport evaluate(const DatasetManifest& manifest, const AlgorithmSpec& algorithm,
                       const IspConfig& isp_cfg, const MetricKnobs& knobs,
                       const EvaluateOptions& options) {
  if (manifest.entries.empty()) throw Error(ErrorCode::kEmptyDataset, "empty manifest");
  validate(isp_cfg);
  const CfaRegistry registry = CfaRegistry::with_defaults();

  DatasetReport report;
  report.images.resize(manifest.entries.size());
  parallel_for(static_cast<int>(manifest.entries.size()), options.threads, [&](int b, int e) {
    for (int i = b; i < e; ++i) {
      const auto& entry = manifest.entries[static_cast<std::size_t>(i)];
      ImageResult& row = report.images[static_cast<std::size_t>(i)];
      row.scene_id = entry.scene_id;
      row.split = entry.split;
      row.gain_db = entry.gain_db;
      if (!entry.gt) continue;
      try {
        const RawImage input = load_raw(entry.input, registry);
        const RawImage gt = load_raw(*entry.gt, registry);
        const RawImage pred = run_algorithm(algorithm, input, entry.gain_db, 1);
        row.metrics = score_pair(pred, gt, isp_cfg, options.lpips, knobs, 1);
      } catch (const std::exception& ex) {
        row.error = ex.what();
      }
    }
  });

  // Reduction in manifest order.
  std::size_t scored = 0;
  double psnr_sum = 0, ssim_sum = 0, kld_sum = 0, lpips_sum = 0, m4_sum = 0;
  bool all_lpips = true;
  bool any_capped = false;
  for (const auto& row : report.images) {
    if (!row.error.empty()) {
      ++report.failures;
      continue;
    }
    if (!row.metrics) {
      ++report.skipped;
      continue;
    }
    const auto& m = *row.metrics;
    ++scored;
    psnr_sum += m.psnr;
    ssim_sum += m.ssim;
    kld_sum += m.kld;
    m4_sum += m.m4;
    if (m.lpips) {
      lpips_sum += *m.lpips;
    } else {
      all_lpips = false;
    }
    any_capped = any_capped || m.has_flag("psnr-capped");
  }
  if (scored > 0) {
    const double n = static_cast<double>(scored);
    report.psnr = psnr_sum / n;
    report.ssim = ssim_sum / n;
    report.kld = kld_sum / n;
    report.mean_of_m4 = m4_sum / n;
    if (all_lpips) report.lpips = lpips_sum / n;
    report.m4_of_means =
        m4(report.psnr, report.ssim, report.lpips.value_or(knobs.lpips_default), report.kld);
  }
  if (options.lpips.provider) {
    report.lpips_policy = "external:" + options.lpips.provider->command();
  } else {
    report.lpips_policy = "default";
    report.flags.push_back("lpips-absent");
  }
  if (any_capped) report.flags.push_back("psnr-capped");
  if (scored == 0) report.flags.push_back("no-scored-images");

  Json cfg;
  cfg["algorithm"] = to_string(algorithm.kind);
  cfg["cfa_out"] = algorithm.cfa_out.name;
  Json params = Json::object();
  for (const auto& [k, v] : algorithm.params) params[k] = v;
  cfg["algorithm_params"] = params;
  cfg["isp"] = {{"demosaic", to_string(isp_cfg.demosaic)},
                {"wb_gains", isp_cfg.wb_gains},
                {"transfer", to_string(isp_cfg.transfer)}};
  cfg["metrics"] = {{"psnr_cap", kPsnrCap},
                    {"ssim", {{"window", knobs.ssim.window},
                              {"sigma", knobs.ssim.sigma},
                              {"k1", knobs.ssim.k1},
                              {"k2", knobs.ssim.k2},
                              {"dynamic_range", knobs.ssim.dynamic_range},
                              {"aggregation", "mean-of-channels"}}},
                    {"kld", {{"bins", knobs.kld.bins},
                             {"eps", knobs.kld.eps},
                             {"log", "natural"},
                             {"direction", "KL(gt||pred)"},
                             {"domain", "normalized [0,1]"}}},
                    {"lpips_default", knobs.lpips_default}};
  cfg["dataset_root"] = manifest.root.string();
  cfg["entries"] = manifest.entries.size();
  report.config = std::move(cfg);
  report.timestamp = utc_timestamp();
  return report;
}

Json to_json(const DatasetReport& report) {
  Json j;
  j["config"] = report.config;
  j["summary"] = {{"psnr", report.psnr},
                  {"ssim", report.ssim},
                  {"lpips", report.lpips ? Json(*report.lpips) : Json(nullptr)},
                  {"kld", report.kld},
                  {"m4_of_means", report.m4_of_means},
                  {"mean_of_m4", report.mean_of_m4},
                  {"images", report.images.size()},
                  {"failures", report.failures},
                  {"skipped", report.skipped},
                  {"lpips_policy", report.lpips_policy},
                  {"flags", report.flags}};
  Json rows = Json::array();
  for (const auto& img : report.images) {
    Json row;
    row["scene"] = img.scene_id;
    row["split"] = img.split;
    row["gain_db"] = img.gain_db;
    if (img.metrics) row["metrics"] = to_json(*img.metrics);
    if (!img.error.empty()) row["error"] = img.error;
    if (!img.metrics && img.error.empty()) row["skipped"] = "no ground truth";
    rows.push_back(std::move(row));
  }
  j["per_image"] = std::move(rows);
  j["timestamp"] = report.timestamp;
  return j;
}

std::string deterministic_dump(const DatasetReport& report) {
  Json j = to_json(report);
  j.erase("timestamp");
  return j.dump(2);
}

// ---------------------------------------------------------------------------

double measure_median_seconds(const std::function<void()>& fn, int repeats) {
  if (repeats < 3) {
    throw Error(ErrorCode::kInvalidArgument, "runtime measurement needs at least 3 repeats");
  }
  fn();  // warm-up
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

RuntimeReport measure_runtime(const RemosaicFn& algorithm, const RawImage& input, int repeats,
                              int threads) {
  RuntimeReport r;
  r.width = input.width;
  r.height = input.height;
  r.repeats = repeats;
  r.threads_multi = threads > 0 ? threads : default_threads();
  r.median_single_s = measure_median_seconds([&] { (void)algorithm(input, 1); }, repeats);
  r.median_multi_s =
      measure_median_seconds([&] { (void)algorithm(input, r.threads_multi); }, repeats);
  r.estimate_64m_single_s = estimate_64m_runtime(r.median_single_s, r.width, r.height);
  r.estimate_64m_multi_s = estimate_64m_runtime(r.median_multi_s, r.width, r.height);
  return r;
}

double estimate_64m_runtime(double measured_s, long long width, long long height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "runtime estimate needs a non-empty input");
  }
  if (!(measured_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "measured runtime must be positive");
  }
  return measured_s * kSixtyFourMegapixels / (static_cast<double>(width) * height);
}

Json to_json(const RuntimeReport& r) {
  return Json{{"width", r.width},
              {"height", r.height},
              {"repeats", r.repeats},
              {"protocol", "median after one warm-up run"},
              {"single_thread", {{"median_s", r.median_single_s},
                                 {"estimate_64m_s", r.estimate_64m_single_s}}},
              {"multi_thread", {{"threads", r.threads_multi},
                                {"median_s", r.median_multi_s},
                                {"estimate_64m_s", r.estimate_64m_multi_s}}}};
}

// ---------------------------------------------------------------------------

std::string to_string(M4Mode mode) {
  return mode == M4Mode::kMeanOfM4 ? "mean-of-m4" : "m4-of-means";
}

M4Mode parse_m4_mode(std::string_view name) {
  if (name == "mean-of-m4") return M4Mode::kMeanOfM4;
  if (name == "m4-of-means") return M4Mode::kM4OfMeans;
  throw Error(ErrorCode::kUnknownKind, "unknown m4 aggregation: " + std::string(name));
}

LeaderboardRow make_leaderboard_row(std::string name, double psnr_db, double ssim_value,
                                    double lpips, double kld, std::optional<double> mean_of_m4) {
  LeaderboardRow row;
  row.name = std::move(name);
  row.psnr = psnr_db;
  row.ssim = ssim_value;
  row.lpips = lpips;
  row.kld = kld;
  row.m4_of_means = m4(psnr_db, ssim_value, lpips, kld);
  row.mean_of_m4 = mean_of_m4.value_or(row.m4_of_means);
  return row;
}

LeaderboardRow leaderboard_row(const std::string& name, const DatasetReport& report) {
  return make_leaderboard_row(name, report.psnr, report.ssim, report.lpips.value_or(0.0),
                              report.kld, report.mean_of_m4);
}

LeaderboardRow leaderboard_row_from_json(const std::string& name, const Json& report) {
  const Json& s = report.contains("summary") ? report.at("summary") : report;
  const double lpips = s.contains("lpips") && !s.at("lpips").is_null() ? s.at("lpips").get<double>()
                                                                       : 0.0;
  std::optional<double> mean_of_m4;
  if (s.contains("mean_of_m4")) mean_of_m4 = s.at("mean_of_m4").get<double>();
  LeaderboardRow row = make_leaderboard_row(name, s.at("psnr").get<double>(),
                                            s.at("ssim").get<double>(), lpips,
                                            s.at("kld").get<double>(), mean_of_m4);
  if (s.contains("runtime_s")) row.runtime_s = s.at("runtime_s").get<double>();
  if (s.contains("runtime_64m_s")) row.runtime_64m_s = s.at("runtime_64m_s").get<double>();
  return row;
}

std::vector<LeaderboardRow> rank_leaderboard(std::vector<LeaderboardRow> rows, M4Mode mode) {
  std::sort(rows.begin(), rows.end(), [mode](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.m4(mode) != b.m4(mode)) return a.m4(mode) > b.m4(mode);
    if (a.psnr != b.psnr) return a.psnr > b.psnr;
    return a.name < b.name;
  });
  return rows;
}

std::string render_leaderboard(const std::vector<LeaderboardRow>& ranked, M4Mode mode) {
  std::size_t name_w = 4;
  for (const auto& r : ranked) name_w = std::max(name_w, r.name.size());
  std::ostringstream out;
  out << std::left << std::setw(5) << "rank" << std::setw(static_cast<int>(name_w) + 2) << "name"
      << std::right << std::setw(8) << "PSNR" << std::setw(8) << "SSIM" << std::setw(8)
      << "LPIPS" << std::setw(8) << "KLD" << std::setw(13) << "M4(means)" << std::setw(13)
      << "M4(per-img)" << std::setw(11) << "time_s" << std::setw(11) << "64M_s" << "\n";
  int rank = 1;
  for (const auto& r : ranked) {
    out << std::left << std::setw(5) << rank++ << std::setw(static_cast<int>(name_w) + 2)
        << r.name << std::right << std::fixed << std::setprecision(2) << std::setw(8) << r.psnr
        << std::setprecision(3) << std::setw(8) << r.ssim << std::setw(8) << r.lpips
        << std::setw(8) << r.kld << std::setprecision(2) << std::setw(13) << r.m4_of_means
        << std::setw(13) << r.mean_of_m4;
    if (r.runtime_s) {
      out << std::setw(11) << *r.runtime_s;
    } else {
      out << std::setw(11) << "-";
    }
    if (r.runtime_64m_s) {
      out << std::setw(11) << *r.runtime_64m_s;
    } else {
      out << std::setw(11) << "-";
    }
    out << "\n";
  }
  out << "ranked by " << to_string(mode) << "\n";
  return out.str();
}

Json leaderboard_json(const std::vector<LeaderboardRow>& ranked, M4Mode mode) {
  Json rows = Json::array();
  int rank = 1;
  for (const auto& r : ranked) {
    rows.push_back({{"rank", rank++},
                    {"name", r.name},
                    {"psnr", r.psnr},
                    {"ssim", r.ssim},
                    {"lpips", r.lpips},
                    {"kld", r.kld},
                    {"m4_of_means", r.m4_of_means},
                    {"mean_of_m4", r.mean_of_m4},
                    {"runtime_s", r.runtime_s ? Json(*r.runtime_s) : Json(nullptr)},
                    {"runtime_64m_s", r.runtime_64m_s ? Json(*r.runtime_64m_s) : Json(nullptr)}});
  }
  return Json{{"mode", to_string(mode)}, {"rows", rows}};
}

}  // namespace rgbw
