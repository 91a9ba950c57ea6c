#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "smoothnet/checkpoint.hpp"
#include "smoothnet/errors.hpp"
#include "smoothnet/io_util.hpp"
#include "smoothnet/windowing.hpp"

namespace smoothnet::cli {

namespace {

using nlohmann::json;

json parse_object(const std::string& text, const std::string& what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(what + ": expected a JSON object");
  return j;
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(what + ": unknown key \"" + it.key() + "\"");
  }
}

template <typename T>
void read_key(const json& j, const char* key, T& out, const std::string& what) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(what + ": bad value for \"" + std::string(key) + "\"");
  }
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_2f(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

FilterSpec filter_spec_from_object(const json& j, const std::string& what) {
  reject_unknown_keys(j,
                      {"name", "kind", "window", "sigma", "polyorder", "min_cutoff", "beta",
                       "d_cutoff", "fps"},
                      what);
  FilterSpec spec;
  std::string kind = filter_kind_name(spec.kind);
  read_key(j, "kind", kind, what);
  spec.kind = filter_kind_from_name(kind);
  read_key(j, "window", spec.window, what);
  read_key(j, "sigma", spec.sigma, what);
  read_key(j, "polyorder", spec.polyorder, what);
  read_key(j, "min_cutoff", spec.min_cutoff, what);
  read_key(j, "beta", spec.beta, what);
  read_key(j, "d_cutoff", spec.d_cutoff, what);
  read_key(j, "fps", spec.fps, what);
  validate_filter_spec(spec);
  return spec;
}

PoseSequence load_any_sequence(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return load_csv(path);
  return load_sequence(path);
}

void save_any_sequence(const std::string& path, const PoseSequence& seq) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    save_csv(path, seq);
  else
    save_sequence(path, seq);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Unweighted per-sequence mean of the three headline metrics, timing the
// transform itself; windows counted as step-1 positions against window_t.
template <typename Transform>
BenchRow bench_method(const std::string& name, const std::vector<SequencePair>& pairs,
                      std::size_t window_t, Transform&& transform) {
  BenchRow row;
  row.method = name;
  std::size_t windows = 0;
  double elapsed = 0.0;
  for (const auto& pair : pairs) {
    const auto t0 = std::chrono::steady_clock::now();
    const PoseSequence out = transform(pair.noisy);
    elapsed += seconds_since(t0);
    const std::size_t len = pair.noisy.length();
    windows += len >= window_t ? len - window_t + 1 : 1;
    const MetricsReport rep = evaluate(out, pair.clean);
    row.accel += rep.accel;
    row.mpjpe += rep.mpjpe;
    row.pa_mpjpe += rep.pa_mpjpe;
  }
  if (pairs.empty()) throw ConfigError("bench: empty test split");
  const double n = static_cast<double>(pairs.size());
  row.accel /= n;
  row.mpjpe /= n;
  row.pa_mpjpe /= n;
  row.throughput = static_cast<double>(windows) / std::max(elapsed, 1e-9);
  return row;
}

std::vector<NamedFilter> default_filters() {
  std::vector<NamedFilter> list;
  FilterSpec gauss;
  gauss.kind = FilterKind::kGaussian;
  gauss.sigma = 4.0;
  gauss.window = 129;
  list.push_back({"gaussian", gauss});
  FilterSpec savgol;
  savgol.kind = FilterKind::kSavgol;
  savgol.window = 31;
  savgol.polyorder = 2;
  list.push_back({"savgol", savgol});
  FilterSpec euro;
  euro.kind = FilterKind::kOneEuro;
  list.push_back({"one_euro", euro});
  FilterSpec avg;
  avg.kind = FilterKind::kMovingAvg;
  avg.window = 5;
  list.push_back({"moving_avg", avg});
  return list;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "method,accel,mpjpe,pa_mpjpe,throughput_windows_per_s\n";
  for (const auto& row : rows) {
    out += row.method + "," + format_g17(row.accel) + "," + format_g17(row.mpjpe) + "," +
           format_g17(row.pa_mpjpe) + "," + format_g17(row.throughput) + "\n";
  }
  return out;
}

std::string bench_markdown(const std::vector<BenchRow>& rows, const GateResult& gate) {
  std::string out =
      "| Method | Accel | MPJPE | PA-MPJPE | Windows/s |\n"
      "|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    out += "| " + row.method + " | " + format_2f(row.accel) + " | " + format_2f(row.mpjpe) +
           " | " + format_2f(row.pa_mpjpe) + " | " + format_2f(row.throughput) + " |\n";
  }
  out += "\nGate: model MPJPE " + format_2f(gate.model_mpjpe);
  if (gate.by_domination) {
    out += " vs best grid Gaussian " + gate.best_name + " MPJPE " +
           format_2f(gate.best_mpjpe) + " (Accel band empty, model smoother than all " +
           std::to_string(gate.grid_size) + " configs) -> " +
           (gate.pass ? "PASS" : "FAIL") + "\n";
  } else if (gate.in_band == 0) {
    out += " vs empty Gaussian band (" + std::to_string(gate.grid_size) +
           " configs, none within the Accel band) -> FAIL\n";
  } else {
    out += " vs best comparable Gaussian " + gate.best_name + " MPJPE " +
           format_2f(gate.best_mpjpe) + " (" + std::to_string(gate.in_band) + "/" +
           std::to_string(gate.grid_size) + " configs in band) -> " +
           (gate.pass ? "PASS" : "FAIL") + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<BenchRow>& rows) {
  std::string out = "window,accel,mpjpe,pa_mpjpe\n";
  for (const auto& row : rows) {
    out += row.method + "," + format_g17(row.accel) + "," + format_g17(row.mpjpe) + "," +
           format_g17(row.pa_mpjpe) + "\n";
  }
  return out;
}

std::string sweep_markdown(const std::vector<BenchRow>& rows) {
  std::string out =
      "| Window | Accel | MPJPE | PA-MPJPE |\n"
      "|---|---|---|---|\n";
  for (const auto& row : rows) {
    out += "| " + row.method + " | " + format_2f(row.accel) + " | " + format_2f(row.mpjpe) +
           " | " + format_2f(row.pa_mpjpe) + " |\n";
  }
  return out;
}

}  // namespace

MotionSpec motion_spec_from_json(const std::string& text) {
  const json j = parse_object(text, "motion spec");
  reject_unknown_keys(j,
                      {"length_l", "channels", "num_sinusoids", "max_freq", "max_amp", "fps",
                       "seed", "layout", "units"},
                      "motion spec");
  MotionSpec spec;
  read_key(j, "length_l", spec.length_l, "motion spec");
  read_key(j, "channels", spec.channels, "motion spec");
  read_key(j, "num_sinusoids", spec.num_sinusoids, "motion spec");
  read_key(j, "max_freq", spec.max_freq, "motion spec");
  read_key(j, "max_amp", spec.max_amp, "motion spec");
  read_key(j, "fps", spec.fps, "motion spec");
  read_key(j, "seed", spec.seed, "motion spec");
  std::string layout = layout_name(spec.layout);
  std::string units = units_name(spec.units);
  read_key(j, "layout", layout, "motion spec");
  read_key(j, "units", units, "motion spec");
  spec.layout = layout_from_name(layout);
  spec.units = units_from_name(units);
  validate_motion_spec(spec);
  return spec;
}

NoiseSpec noise_spec_from_json(const std::string& text) {
  const json j = parse_object(text, "noise spec");
  reject_unknown_keys(j, {"kind", "p", "sigma", "span", "bias", "seed"}, "noise spec");
  NoiseSpec spec;
  std::string kind = noise_kind_name(spec.kind);
  read_key(j, "kind", kind, "noise spec");
  spec.kind = noise_kind_from_name(kind);
  read_key(j, "p", spec.p, "noise spec");
  read_key(j, "sigma", spec.sigma, "noise spec");
  read_key(j, "span", spec.span, "noise spec");
  read_key(j, "bias", spec.bias, "noise spec");
  read_key(j, "seed", spec.seed, "noise spec");
  validate_noise_spec(spec);
  return spec;
}

FilterSpec filter_spec_from_json(const std::string& text) {
  return filter_spec_from_object(parse_object(text, "filter spec"), "filter spec");
}

std::vector<NamedFilter> filter_list_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("filter list: ") + e.what());
  }
  if (j.is_object() && j.contains("filters")) j = j.at("filters");
  if (!j.is_array()) throw ParseError("filter list: expected an array or {\"filters\": [...]}");
  std::vector<NamedFilter> list;
  for (const auto& item : j) {
    if (!item.is_object()) throw ParseError("filter list: entries must be objects");
    NamedFilter named;
    named.spec = filter_spec_from_object(item, "filter list entry");
    named.name = filter_kind_name(named.spec.kind);
    read_key(item, "name", named.name, "filter list entry");
    list.push_back(std::move(named));
  }
  return list;
}

Dataset load_dataset(const Manifest& manifest) {
  Dataset data;
  for (const auto& pair : manifest.pairs) {
    SequencePair loaded{load_sequence(pair.noisy), load_sequence(pair.clean)};
    if (pair.split == "train")
      data.train.push_back(std::move(loaded));
    else
      data.test.push_back(std::move(loaded));
  }
  return data;
}

void cmd_synth(const SynthOptions& opt) {
  MotionSpec motion = motion_spec_from_json(read_file(opt.motion_spec_path));
  NoiseSpec noise = noise_spec_from_json(read_file(opt.noise_spec_path));
  if (opt.seed_set) {
    motion.seed = opt.seed;
    noise.seed = Rng::derive_seed(opt.seed, 0xA5);
  }
  if (opt.count == 0) throw ConfigError("synth: count must be positive");
  if (!(opt.split >= 0.0 && opt.split <= 1.0))
    throw ConfigError("synth: split must lie in [0, 1]");
  if (opt.out_dir.empty()) throw ConfigError("synth: out-dir is required");

  const Dataset data = make_dataset(motion, noise, opt.count, opt.split);
  std::filesystem::create_directories(opt.out_dir);

  Manifest manifest;
  manifest.seed = opt.seed_set ? opt.seed : motion.seed;
  std::size_t index = 0;
  auto emit = [&](const std::vector<SequencePair>& pairs, const char* split) {
    for (const auto& pair : pairs) {
      char noisy_name[32];
      char clean_name[32];
      std::snprintf(noisy_name, sizeof(noisy_name), "seq_%04zu_noisy.json", index);
      std::snprintf(clean_name, sizeof(clean_name), "seq_%04zu_clean.json", index);
      save_sequence((std::filesystem::path(opt.out_dir) / noisy_name).string(), pair.noisy);
      save_sequence((std::filesystem::path(opt.out_dir) / clean_name).string(), pair.clean);
      manifest.pairs.push_back({noisy_name, clean_name, split});
      ++index;
    }
  };
  emit(data.train, "train");
  emit(data.test, "test");
  save_manifest((std::filesystem::path(opt.out_dir) / "manifest.json").string(), manifest);
}

void cmd_train(const TrainOptions& opt) {
  const TrainConfig cfg = load_train_config(opt.config_path);
  const Manifest manifest = load_manifest(opt.data_path);
  const Dataset data = load_dataset(manifest);

  std::string log_path = opt.log_path;
  if (log_path.empty()) {
    log_path = opt.out_path;
    const std::string ext = ".json";
    if (log_path.size() > ext.size() &&
        log_path.substr(log_path.size() - ext.size()) == ext)
      log_path.resize(log_path.size() - ext.size());
    log_path += "_log.csv";
  }

  const TrainResult result = train(cfg, data);
  save_checkpoint(opt.out_path, result.checkpoint);
  save_train_log(log_path, result.log);
  if (result.log.aborted) throw NumericError("training aborted on non-finite loss");
}

void cmd_smooth(const SmoothOptions& opt) {
  const Checkpoint ckpt = load_checkpoint(opt.model_path);
  const PoseSequence input = load_any_sequence(opt.input_path);
  MergeWeighting weighting;
  if (opt.merge == "uniform")
    weighting = MergeWeighting::kUniform;
  else if (opt.merge == "triangular")
    weighting = MergeWeighting::kTriangular;
  else
    throw ConfigError("smooth: merge must be \"uniform\" or \"triangular\"");
  const PoseSequence out =
      smooth_sequence(ckpt.config, ckpt.weights, input, opt.step, weighting);
  save_any_sequence(opt.output_path, out);
}

void cmd_filter(const FilterOptions& opt) {
  validate_filter_spec(opt.spec);
  const PoseSequence input = load_any_sequence(opt.input_path);
  const PoseSequence out = apply_filter(input, opt.spec);
  save_any_sequence(opt.output_path, out);
}

std::string metrics_to_json(const MetricsReport& report) {
  json j;
  j["mpjpe"] = report.mpjpe;
  j["pa_mpjpe"] = report.pa_mpjpe;
  j["accel"] = report.accel;
  j["mpjpe_worst1"] = report.mpjpe_worst1;
  j["accel_worst1"] = report.accel_worst1;
  return j.dump(2) + "\n";
}

std::string metrics_to_csv(const MetricsReport& report) {
  std::string out = "metric,value\n";
  out += "mpjpe," + format_g17(report.mpjpe) + "\n";
  out += "pa_mpjpe," + format_g17(report.pa_mpjpe) + "\n";
  out += "accel," + format_g17(report.accel) + "\n";
  out += "mpjpe_worst1," + format_g17(report.mpjpe_worst1) + "\n";
  out += "accel_worst1," + format_g17(report.accel_worst1) + "\n";
  return out;
}

MetricsReport cmd_eval(const EvalOptions& opt) {
  const PoseSequence pred = load_any_sequence(opt.pred_path);
  const PoseSequence gt = load_any_sequence(opt.gt_path);
  const MetricsReport report = evaluate(pred, gt, opt.accel_worst);
  if (opt.out_path.empty()) {
    std::fputs(metrics_to_json(report).c_str(), stdout);
  } else if (opt.out_path.size() >= 4 &&
             opt.out_path.substr(opt.out_path.size() - 4) == ".csv") {
    write_file_atomic(opt.out_path, metrics_to_csv(report));
  } else {
    write_file_atomic(opt.out_path, metrics_to_json(report));
  }
  return report;
}

BenchOutcome run_bench(const BenchOptions& opt) {
  const Manifest manifest = load_manifest(opt.data_path);
  const Dataset data = load_dataset(manifest);
  if (data.test.empty()) throw ConfigError("bench: manifest has no test pairs");
  const Checkpoint ckpt = load_checkpoint(opt.model_path);
  const std::size_t window_t = ckpt.config.window_t;

  std::vector<NamedFilter> filters = default_filters();
  if (!opt.filters_path.empty())
    filters = filter_list_from_json(read_file(opt.filters_path));

  BenchOutcome outcome;
  outcome.rows.push_back(
      bench_method("input", data.test, window_t, [](const PoseSequence& seq) { return seq; }));
  outcome.rows.push_back(
      bench_method("smoothnet", data.test, window_t, [&](const PoseSequence& seq) {
        return smooth_sequence(ckpt.config, ckpt.weights, seq, 1);
      }));
  for (const auto& named : filters) {
    outcome.rows.push_back(
        bench_method(named.name, data.test, window_t, [&](const PoseSequence& seq) {
          return apply_filter(seq, named.spec);
        }));
  }

  const BenchRow& model_row = outcome.rows[1];
  outcome.gate.model_mpjpe = model_row.mpjpe;
  outcome.gate.model_accel = model_row.accel;
  outcome.gate.best_mpjpe = std::numeric_limits<double>::quiet_NaN();
  double overall_best = std::numeric_limits<double>::quiet_NaN();
  std::string overall_best_name;
  bool any_smoother = false;
  for (double sigma : opt.grid_sigmas) {
    for (std::size_t window : opt.grid_windows) {
      FilterSpec spec;
      spec.kind = FilterKind::kGaussian;
      spec.sigma = sigma;
      spec.window = window;
      std::string name =
          "gaussian(sigma=" + format_g17(sigma) + " window=" + std::to_string(window) + ")";
      BenchRow row = bench_method(name, data.test, window_t, [&](const PoseSequence& seq) {
        return apply_filter(seq, spec);
      });
      ++outcome.gate.grid_size;
      if (std::abs(row.accel - outcome.gate.model_accel) <=
          opt.accel_band * outcome.gate.model_accel) {
        ++outcome.gate.in_band;
        if (!(row.mpjpe >= outcome.gate.best_mpjpe)) {
          outcome.gate.best_mpjpe = row.mpjpe;
          outcome.gate.best_name = name;
        }
      }
      if (row.accel < outcome.gate.model_accel) any_smoother = true;
      if (!(row.mpjpe >= overall_best)) {
        overall_best = row.mpjpe;
        overall_best_name = name;
      }
      outcome.grid.push_back(std::move(row));
    }
  }
  if (outcome.gate.in_band > 0) {
    outcome.gate.pass = outcome.gate.model_mpjpe <= outcome.gate.best_mpjpe;
  } else if (outcome.gate.grid_size > 0 && !any_smoother) {
    // The model out-smooths the whole grid; demand it win on MPJPE outright.
    outcome.gate.by_domination = true;
    outcome.gate.best_mpjpe = overall_best;
    outcome.gate.best_name = overall_best_name;
    outcome.gate.pass = outcome.gate.model_mpjpe <= overall_best;
  }

  for (const auto& item : opt.sweep_window) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("bench: sweep-window items must look like W:checkpoint.json");
    std::size_t w = 0;
    try {
      w = std::stoul(item.substr(0, colon));
    } catch (const std::exception&) {
      throw ConfigError("bench: bad sweep-window size in \"" + item + "\"");
    }
    const Checkpoint sweep_ckpt = load_checkpoint(item.substr(colon + 1));
    if (sweep_ckpt.config.window_t != w)
      throw ConfigError("bench: checkpoint window " +
                        std::to_string(sweep_ckpt.config.window_t) +
                        " does not match requested " + std::to_string(w));
    BenchRow row = bench_method(std::to_string(w), data.test, sweep_ckpt.config.window_t,
                                [&](const PoseSequence& seq) {
                                  return smooth_sequence(sweep_ckpt.config, sweep_ckpt.weights,
                                                         seq, 1);
                                });
    outcome.sweep.push_back(std::move(row));
  }
  return outcome;
}

void cmd_bench(const BenchOptions& opt) {
  if (opt.out_dir.empty()) throw ConfigError("bench: out dir is required");
  const BenchOutcome outcome = run_bench(opt);
  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);
  write_file_atomic((dir / "bench.csv").string(), bench_csv(outcome.rows));
  write_file_atomic((dir / "gaussian_grid.csv").string(), bench_csv(outcome.grid));
  const std::string md = bench_markdown(outcome.rows, outcome.gate);
  write_file_atomic((dir / "bench.md").string(), md);
  if (!outcome.sweep.empty()) {
    write_file_atomic((dir / "window_sweep.csv").string(), sweep_csv(outcome.sweep));
    write_file_atomic((dir / "window_sweep.md").string(), sweep_markdown(outcome.sweep));
  }
  std::fputs(md.c_str(), stdout);
}

int run_command(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ShapeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace smoothnet::cli
