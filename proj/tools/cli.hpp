#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "smoothnet/filters.hpp"
#include "smoothnet/metrics.hpp"
#include "smoothnet/sequence_io.hpp"
#include "smoothnet/synth.hpp"
#include "smoothnet/trainer.hpp"

namespace smoothnet::cli {

// JSON spec files for the synth command. Unknown keys are rejected so typos
// fail loudly; every known key is optional and falls back to the defaults.
MotionSpec motion_spec_from_json(const std::string& text);
NoiseSpec noise_spec_from_json(const std::string& text);

// Single filter config object, and a list of named configs for cmd_bench
// ({"filters": [...]} or a bare array; "name" defaults to the kind).
FilterSpec filter_spec_from_json(const std::string& text);
struct NamedFilter {
  std::string name;
  FilterSpec spec;
};
std::vector<NamedFilter> filter_list_from_json(const std::string& text);

// Loads every manifest pair into memory, grouped by split.
Dataset load_dataset(const Manifest& manifest);

struct SynthOptions {
  std::string motion_spec_path;
  std::string noise_spec_path;
  std::size_t count = 8;
  double split = 0.5;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;  // when false, the spec files' seeds win
};

struct TrainOptions {
  std::string config_path;
  std::string data_path;
  std::string out_path;
  std::string log_path;  // empty: derived from out_path
};

struct SmoothOptions {
  std::string model_path;
  std::string input_path;
  std::string output_path;
  std::size_t step = 1;
  std::string merge = "uniform";  // or "triangular"
};

struct FilterOptions {
  FilterSpec spec;
  std::string input_path;
  std::string output_path;
};

struct EvalOptions {
  std::string pred_path;
  std::string gt_path;
  std::string out_path;  // .json or .csv; empty prints JSON to stdout
  WorstAccelMode accel_worst = WorstAccelMode::kCorresponding;
};

struct BenchOptions {
  std::string data_path;
  std::string model_path;
  std::string filters_path;  // empty: built-in default filter set
  std::string out_dir;
  std::vector<std::string> sweep_window;  // "W:checkpoint.json" items
  // Gaussian grid probed for the gated filter comparison.
  std::vector<double> grid_sigmas{1.0, 2.0, 3.0, 4.0, 6.0, 8.0};
  std::vector<std::size_t> grid_windows{5, 9, 17, 33, 65, 129};
  double accel_band = 0.25;
};

struct BenchRow {
  std::string method;
  double accel = 0.0;
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  double throughput = 0.0;  // windows/s, step-1 window count over wall time
};

// Gated check: best Gaussian MPJPE among grid configs whose Accel lands
// within accel_band of the model's, compared against the model's MPJPE.
// When the band is empty because every grid config is less smooth than the
// model, the gate falls back to outright domination: the model must beat the
// best MPJPE over the whole grid (a strictly harder comparison). An empty
// band with smoother grid configs present means the grid is too coarse to
// compare, which fails the gate.
struct GateResult {
  double model_mpjpe = 0.0;
  double model_accel = 0.0;
  std::string best_name;
  double best_mpjpe = 0.0;
  std::size_t grid_size = 0;
  std::size_t in_band = 0;
  bool by_domination = false;  // band empty, whole-grid comparison applied
  bool pass = false;
};

struct BenchOutcome {
  std::vector<BenchRow> rows;       // input baseline, model, filters
  std::vector<BenchRow> grid;       // full Gaussian grid
  GateResult gate;
  std::vector<BenchRow> sweep;      // per-W rows when sweep_window given
};

// Library-level command bodies; they throw smoothnet errors and write
// nothing until validation passes.
void cmd_synth(const SynthOptions& opt);
void cmd_train(const TrainOptions& opt);
void cmd_smooth(const SmoothOptions& opt);
void cmd_filter(const FilterOptions& opt);
MetricsReport cmd_eval(const EvalOptions& opt);
BenchOutcome run_bench(const BenchOptions& opt);
void cmd_bench(const BenchOptions& opt);

std::string metrics_to_json(const MetricsReport& report);
std::string metrics_to_csv(const MetricsReport& report);

// Maps exceptions to process exit codes: 0 success, 2 usage/validation,
// 3 runtime/numeric failure. Prints the message to stderr.
int run_command(const std::function<void()>& body);

}  // namespace smoothnet::cli
