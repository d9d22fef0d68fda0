// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rgbw/cfa.hpp"
#include "rgbw/datagen.hpp"
#include "rgbw/error.hpp"
#include "rgbw/harness.hpp"
#include "rgbw/isp.hpp"
#include "rgbw/metrics.hpp"
#include "rgbw/noise.hpp"
#include "rgbw/parallel.hpp"
#include "rgbw/raw_io.hpp"
#include "rgbw/remosaic.hpp"

namespace fs = std::filesystem;
using namespace rgbw;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitImageFailures = 3;

struct Globals {
  std::uint64_t seed = 2022;
  int threads = 0;
  std::string config_path;

  ConfigMap config;
  NoiseRegistry noise = NoiseRegistry::with_defaults();
  IspConfig isp;
  MetricKnobs knobs;

  int worker_count() const { return threads > 0 ? threads : default_threads(); }

  void load() {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw Error(ErrorCode::kIo, "cannot read config " + config_path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    config = parse_config(text);
    noise.load_config(text);
    apply_isp_config(config, isp);
    apply_metric_config(config, knobs);
  }
};

// Per-subcommand ISP overrides on top of the config file.
struct IspFlags {
  std::string demosaic;
  std::string transfer;
  std::vector<double> wb;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--demosaic", demosaic, "bilinear | mhc5x5");
    cmd->add_option("--transfer", transfer, "srgb | gamma22 | linear");
    cmd->add_option("--wb", wb, "white-balance gains R G B")->expected(3);
  }
  IspConfig resolve(IspConfig base) const {
    if (!demosaic.empty()) base.demosaic = parse_demosaic_kind(demosaic);
    if (!transfer.empty()) base.transfer = parse_transfer(transfer);
    if (!wb.empty()) base.wb_gains = {wb[0], wb[1], wb[2]};
    validate(base);
    return base;
  }
};

struct AlgoFlags {
  std::string algo = "white-guided";
  std::string cfa_out = "RGGB";
  std::string bank;
  std::vector<std::string> gain_banks;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--algo", algo, "identity | nearest | white-guided | filter-bank");
    cmd->add_option("--cfa-out", cfa_out, "Bayer phase of the output");
    cmd->add_option("--bank", bank, "filter bank used for every gain without its own");
    cmd->add_option("--gain-bank", gain_banks, "GAIN=FILE filter bank for one gain");
  }

  AlgorithmSpec resolve() const {
    const CfaRegistry registry = CfaRegistry::with_defaults();
    AlgorithmSpec spec;
    spec.kind = parse_algorithm(algo);
    spec.cfa_out = registry.find(cfa_out);
    if (!bank.empty()) {
      spec.fallback_bank = read_filter_bank(read_file(bank), registry);
      spec.params["bank"] = bank;
    }
    for (const auto& item : gain_banks) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::kInvalidArgument, "--gain-bank expects GAIN=FILE, got " + item);
      }
      const int gain = std::stoi(item.substr(0, eq));
      const std::string path = item.substr(eq + 1);
      spec.banks[gain] = read_filter_bank(read_file(path), registry);
      spec.params["bank." + std::to_string(gain)] = path;
    }
    if (spec.kind == AlgorithmKind::kFilterBank && spec.banks.empty() && !spec.fallback_bank) {
      throw Error(ErrorCode::kInvalidArgument, "filter-bank needs --bank or --gain-bank");
    }
    for (const auto& [gain, b] : spec.banks) {
      if (b.cfa_out != spec.cfa_out) {
        throw Error(ErrorCode::kDescriptorMismatch, "bank for " + std::to_string(gain) +
                                                        " dB outputs " + b.cfa_out.name);
      }
    }
    if (spec.fallback_bank && spec.fallback_bank->cfa_out != spec.cfa_out) {
      throw Error(ErrorCode::kDescriptorMismatch,
                  "bank outputs " + spec.fallback_bank->cfa_out.name + ", not " + cfa_out);
    }
    return spec;
  }
};

void write_json(const std::string& path, const Json& j) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
}

RawImage load_capture(const fs::path& path, int black, int white) {
  const Bytes bytes = read_file(path);
  if (path.extension() == ".pgm") {
    return raw_from_pgm16(read_pgm16(bytes), make_rgbw_default(), black, white);
  }
  return read_raw(bytes, CfaRegistry::with_defaults());
}

// ---------------------------------------------------------------------------

struct GenData {
  std::string out;
  std::string split = "valid";
  int scenes = 10;
  int size = 512;
  std::vector<int> gains = kChallengeGains;
  std::string captures;
  int crop = 0;
  int capture_black = 64;
  int capture_white = 1023;
  std::string prefix = "scene";
  std::string demosaic = "mhc5x5";

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("gen-data", "Synthesize RGBW/Bayer pairs in the dataset layout");
    cmd->add_option("--out", out, "dataset root")->required();
    cmd->add_option("--split", split, "train | valid | test")->check(CLI::IsMember(kSplits));
    cmd->add_option("--scenes", scenes, "number of synthetic scenes");
    cmd->add_option("--size", size, "pair resolution (captures are twice as large)");
    cmd->add_option("--gains", gains, "noise gains in dB")->delimiter(',');
    cmd->add_option("--captures", captures, "directory of full-resolution RGBW captures (.rmsc/.pgm)");
    cmd->add_option("--crop", crop, "center-crop captures to this square size first");
    cmd->add_option("--capture-black", capture_black, "black level of .pgm captures");
    cmd->add_option("--capture-white", capture_white, "white level of .pgm captures");
    cmd->add_option("--prefix", prefix, "scene id prefix");
    cmd->add_option("--demosaic", demosaic, "demosaic used for the binned Bayer");
  }

  int run(const Globals& g) const {
    std::vector<PairSample> pairs;
    if (captures.empty()) {
      SyntheticSetOptions opts;
      opts.scenes = scenes;
      opts.size = size;
      opts.gains = gains;
      opts.seed = g.seed;
      opts.demosaic = parse_demosaic_kind(demosaic);
      opts.prefix = prefix;
      opts.threads = g.worker_count();
      pairs = make_synthetic_pairs(opts, g.noise);
    } else {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(captures)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".rmsc" || ext == ".pgm")) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw Error(ErrorCode::kEmptyDataset, "no captures in " + captures);
      PairOptions popts;
      popts.demosaic = parse_demosaic_kind(demosaic);
      popts.threads = g.worker_count();
      for (std::size_t i = 0; i < files.size(); ++i) {
        RawImage capture = load_capture(files[i], capture_black, capture_white);
        if (crop > 0) capture = crop_center(capture, crop, crop);
        const PairSample clean = generate_pair(capture, popts, files[i].stem().string());
        for (int gain : gains) {
          PairSample p = clean;
          p.gain_db = gain;
          p.input_rgbw = synthesize_noise(clean.input_rgbw, g.noise.profile_for_gain(gain),
                                          derive_seed(g.seed, i, static_cast<std::uint64_t>(gain) + 1),
                                          g.worker_count());
          pairs.push_back(std::move(p));
        }
      }
    }
    write_dataset(out, split, pairs);
    std::cout << "wrote " << pairs.size() << " inputs to " << (fs::path(out) / split).string()
              << "\n";
    return 0;
  }
};

struct AddNoise {
  std::string in, out;
  int gain = 0;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("add-noise", "Add calibrated sensor noise to a raw file");
    cmd->add_option("--in", in, "input .rmsc")->required();
    cmd->add_option("--out", out, "output .rmsc")->required();
    cmd->add_option("--gain", gain, "gain in dB (must be registered)");
  }

  int run(const Globals& g) const {
    const RawImage raw = load_raw(in);
    save_raw(out, synthesize_noise(raw, g.noise.profile_for_gain(gain), g.seed, g.worker_count()));
    return 0;
  }
};

struct Remosaic {
  std::string in, out;
  int gain = 0;
  AlgoFlags algo;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("remosaic", "Convert an RGBW raw to Bayer");
    cmd->add_option("--in", in, "RGBW .rmsc")->required();
    cmd->add_option("--out", out, "Bayer .rmsc")->required();
    cmd->add_option("--gain", gain, "gain of the input, selects the filter bank");
    algo.add_to(cmd);
  }

  int run(const Globals& g) const {
    const AlgorithmSpec spec = algo.resolve();
    save_raw(out, run_algorithm(spec, load_raw(in), gain, g.worker_count()));
    return 0;
  }
};

struct Train {
  std::string data, out;
  std::string split = "train";
  std::optional<int> gain;
  int radius = kDefaultPatchRadius;
  double lambda = kDefaultLambda;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Fit a per-phase filter bank by ridge regression");
    cmd->add_option("--data", data, "dataset root")->required();
    cmd->add_option("--out", out, "filter bank file")->required();
    cmd->add_option("--split", split, "split to train on");
    cmd->add_option("--gain", gain, "train on one gain only (default: all gains pooled)");
    cmd->add_option("--radius", radius, "patch radius");
    cmd->add_option("--lambda", lambda, "ridge coefficient");
  }

  int run(const Globals& g) const {
    const DatasetManifest manifest = filter_manifest(build_manifest(data), split, gain);
    const auto pairs = load_pairs(manifest);
    const FilterBank bank = train_filter_bank(pairs, radius, lambda, g.worker_count());
    write_file(out, write_filter_bank(bank));
    double worst = 0.0;
    for (const auto& f : bank.fits) worst = std::max(worst, f.relative_residual);
    std::cout << "trained " << bank.phases() << " phases on " << pairs.size()
              << " pairs, worst relative residual " << worst << "\n";
    return 0;
  }
};

struct Isp {
  std::string in, out;
  IspFlags flags;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("isp", "Render a Bayer raw to an 8-bit PNG");
    cmd->add_option("--in", in, "Bayer .rmsc")->required();
    cmd->add_option("--out", out, "output .png")->required();
    flags.add_to(cmd);
  }

  int run(const Globals& g) const {
    const PlanarImage rgb = run_isp(load_raw(in), flags.resolve(g.isp), g.worker_count());
    write_file(out, write_rgb_png(rgb));
    return 0;
  }
};

struct Score {
  std::string pred, gt, data, report;
  std::string split = "valid";
  std::optional<int> gain;
  std::string lpips_provider;
  std::string scratch;
  AlgoFlags algo;
  IspFlags isp;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("score", "Score one pair or a whole dataset split");
    cmd->add_option("--pred", pred, "predicted Bayer .rmsc");
    cmd->add_option("--gt", gt, "ground-truth Bayer .rmsc");
    cmd->add_option("--data", data, "dataset root (runs --algo over every entry)");
    cmd->add_option("--split", split, "split to evaluate");
    cmd->add_option("--gain", gain, "only this gain");
    cmd->add_option("--report", report, "write the JSON report here (default stdout)");
    cmd->add_option("--lpips-provider", lpips_provider, "command invoked as CMD A.png B.png");
    cmd->add_option("--scratch", scratch, "directory for images handed to the provider");
    algo.add_to(cmd);
    isp.add_to(cmd);
  }

  int run(const Globals& g) const {
    const IspConfig isp_cfg = isp.resolve(g.isp);
    std::optional<LpipsProvider> provider;
    LpipsPolicy policy;
    if (!lpips_provider.empty()) {
      provider.emplace(lpips_provider);
      policy.provider = &*provider;
      policy.scratch_dir = scratch.empty() ? fs::temp_directory_path() : fs::path(scratch);
    }
    if (!pred.empty() || !gt.empty()) {
      if (pred.empty() || gt.empty() || !data.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "pair scoring needs --pred and --gt only");
      }
      const MetricReport r =
          score_pair(load_raw(pred), load_raw(gt), isp_cfg, policy, g.knobs, g.worker_count());
      write_json(report, to_json(r));
      return 0;
    }
    if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "need --pred/--gt or --data");
    const DatasetManifest manifest = filter_manifest(build_manifest(data), split, gain);
    for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
    if (manifest.entries.empty()) {
      throw Error(ErrorCode::kEmptyDataset, "no entries in split " + split);
    }
    EvaluateOptions opts;
    opts.threads = g.worker_count();
    opts.lpips = policy;
    const DatasetReport r = evaluate(manifest, algo.resolve(), isp_cfg, g.knobs, opts);
    write_json(report, to_json(r));
    if (r.failures > 0) {
      std::cerr << r.failures << " image(s) failed\n";
      return kExitImageFailures;
    }
    return 0;
  }
};

struct Bench {
  std::string in;
  int width = 1200;
  int height = 1800;
  int repeats = 5;
  int gain = 0;
  std::string report;
  AlgoFlags algo;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("bench", "Median runtime and the 64-megapixel estimate");
    cmd->add_option("--in", in, "RGBW .rmsc input (default: synthetic noise field)");
    cmd->add_option("--width", width, "synthetic input width");
    cmd->add_option("--height", height, "synthetic input height");
    cmd->add_option("--repeats", repeats, "timed runs after one warm-up");
    cmd->add_option("--gain", gain, "gain passed to the algorithm");
    cmd->add_option("--report", report, "write the JSON report here (default stdout)");
    algo.add_to(cmd);
  }

  int run(const Globals& g) const {
    RawImage input;
    if (in.empty()) {
      input = mosaic(generate_synthetic_scene(SceneKind::kNoiseField, width, height, g.seed),
                     make_rgbw_default());
    } else {
      input = load_raw(in);
    }
    const AlgorithmSpec spec = algo.resolve();
    const RemosaicFn fn = [&](const RawImage& raw, int threads) {
      return run_algorithm(spec, raw, gain, threads);
    };
    Json j = to_json(measure_runtime(fn, input, repeats, g.worker_count()));
    j["algorithm"] = to_string(spec.kind);
    write_json(report, j);
    return 0;
  }
};

struct Leaderboard {
  std::vector<std::string> reports;
  std::string mode = "m4-of-means";
  bool json = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("leaderboard", "Rank evaluation reports by M4");
    cmd->add_option("reports", reports, "NAME=REPORT.json entries")->required();
    cmd->add_option("--mode", mode, "m4-of-means | mean-of-m4");
    cmd->add_flag("--json", json, "print machine-readable output");
  }

  int run(const Globals&) const {
    const M4Mode m = parse_m4_mode(mode);
    std::vector<LeaderboardRow> rows;
    for (const auto& item : reports) {
      const auto eq = item.find('=');
      const std::string name = eq == std::string::npos ? fs::path(item).stem().string()
                                                       : item.substr(0, eq);
      const std::string path = eq == std::string::npos ? item : item.substr(eq + 1);
      const Bytes bytes = read_file(path);
      Json j;
      try {
        j = Json::parse(bytes.begin(), bytes.end());
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
      }
      rows.push_back(leaderboard_row_from_json(name, j));
    }
    const auto ranked = rank_leaderboard(std::move(rows), m);
    if (json) {
      std::cout << leaderboard_json(ranked, m).dump(2) << "\n";
    } else {
      std::cout << render_leaderboard(ranked, m);
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RGBW to Bayer remosaic benchmark toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware concurrency)");
  app.add_option("--config", g.config_path, "key=value configuration file");

  GenData gen;
  AddNoise noise;
  Remosaic remosaic;
  Train train;
  Isp isp;
  Score score;
  Bench bench;
  Leaderboard board;
  gen.add_to(app);
  noise.add_to(app);
  remosaic.add_to(app);
  train.add_to(app);
  isp.add_to(app);
  score.add_to(app);
  bench.add_to(app);
  board.add_to(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    g.load();
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "gen-data") return gen.run(g);
    if (name == "add-noise") return noise.run(g);
    if (name == "remosaic") return remosaic.run(g);
    if (name == "train") return train.run(g);
    if (name == "isp") return isp.run(g);
    if (name == "score") return score.run(g);
    if (name == "bench") return bench.run(g);
    if (name == "leaderboard") return board.run(g);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
