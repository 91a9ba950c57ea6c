#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "cli.hpp"
#include "smoothnet/errors.hpp"
#include "smoothnet/parallel.hpp"

namespace cli = smoothnet::cli;

int main(int argc, char** argv) {
  CLI::App app{"smoothnet: temporal pose-sequence refinement toolkit"};
  app.require_subcommand(1);

  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = hardware concurrency)");

  cli::SynthOptions synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate paired noisy/clean sequences plus a manifest");
  synth_cmd->add_option("--motion-spec", synth.motion_spec_path, "Motion spec JSON file")
      ->required();
  synth_cmd->add_option("--noise-spec", synth.noise_spec_path, "Noise spec JSON file")
      ->required();
  synth_cmd->add_option("--count", synth.count, "Number of paired sequences");
  synth_cmd->add_option("--split", synth.split, "Train fraction in [0, 1]");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  auto* seed_opt = synth_cmd->add_option("--seed", synth.seed,
                                         "Master seed overriding the spec files' seeds");

  cli::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a synth manifest");
  train_cmd->add_option("--config", train.config_path, "Train config JSON file")->required();
  train_cmd->add_option("--data", train.data_path, "Dataset manifest JSON")->required();
  train_cmd->add_option("--out", train.out_path, "Checkpoint output path")->required();
  train_cmd->add_option("--log", train.log_path,
                        "Train log CSV path (default: derived from --out)");

  cli::SmoothOptions smooth;
  auto* smooth_cmd = app.add_subcommand("smooth", "Refine a sequence with a trained model");
  smooth_cmd->add_option("--model", smooth.model_path, "Checkpoint JSON")->required();
  smooth_cmd->add_option("--input", smooth.input_path, "Input sequence (.json or .csv)")
      ->required();
  smooth_cmd->add_option("--output", smooth.output_path, "Output sequence (.json or .csv)")
      ->required();
  smooth_cmd->add_option("--step", smooth.step, "Window stride (default 1)");
  smooth_cmd->add_option("--merge", smooth.merge, "Overlap weighting: uniform | triangular");

  cli::FilterOptions filter;
  std::string filter_kind = "gaussian";
  auto* filter_cmd = app.add_subcommand("filter", "Apply a classic low-pass filter");
  filter_cmd
      ->add_option("--kind", filter_kind, "gaussian | savgol | one-euro | moving-avg")
      ->required();
  filter_cmd->add_option("--window", filter.spec.window, "Odd window length");
  filter_cmd->add_option("--sigma", filter.spec.sigma, "Gaussian sigma in frames");
  filter_cmd->add_option("--polyorder", filter.spec.polyorder, "Savitzky-Golay fit degree");
  filter_cmd->add_option("--min-cutoff", filter.spec.min_cutoff, "One-Euro minimum cutoff Hz");
  filter_cmd->add_option("--beta", filter.spec.beta, "One-Euro speed coefficient");
  filter_cmd->add_option("--d-cutoff", filter.spec.d_cutoff, "One-Euro derivative cutoff Hz");
  filter_cmd->add_option("--fps", filter.spec.fps, "One-Euro rate (0 = sequence fps)");
  filter_cmd->add_option("--input", filter.input_path, "Input sequence (.json or .csv)")
      ->required();
  filter_cmd->add_option("--output", filter.output_path, "Output sequence (.json or .csv)")
      ->required();

  cli::EvalOptions eval;
  std::string accel_worst = "corresponding";
  auto* eval_cmd = app.add_subcommand("eval", "Compare a prediction against ground truth");
  eval_cmd->add_option("--pred", eval.pred_path, "Predicted sequence")->required();
  eval_cmd->add_option("--gt", eval.gt_path, "Ground-truth sequence")->required();
  eval_cmd->add_option("--out", eval.out_path,
                       "Report path (.json or .csv; default: JSON to stdout)");
  eval_cmd->add_option("--accel-worst", accel_worst,
                       "Worst-1% accel frames: corresponding | independent");

  cli::BenchOptions bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "Benchmark the model against filters on the test split");
  bench_cmd->add_option("--data", bench.data_path, "Dataset manifest JSON")->required();
  bench_cmd->add_option("--model", bench.model_path, "Trained checkpoint JSON")->required();
  bench_cmd->add_option("--filters", bench.filters_path,
                        "Filter list JSON (default: built-in set)");
  bench_cmd->add_option("--out", bench.out_dir, "Report output directory")->required();
  bench_cmd->add_option("--sweep-window", bench.sweep_window,
                        "Window-sweep items, each W:checkpoint.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  smoothnet::set_max_threads(threads);

  return cli::run_command([&] {
    if (synth_cmd->parsed()) {
      synth.seed_set = seed_opt->count() > 0;
      cli::cmd_synth(synth);
    } else if (train_cmd->parsed()) {
      cli::cmd_train(train);
    } else if (smooth_cmd->parsed()) {
      cli::cmd_smooth(smooth);
    } else if (filter_cmd->parsed()) {
      filter.spec.kind = smoothnet::filter_kind_from_name(filter_kind);
      cli::cmd_filter(filter);
    } else if (eval_cmd->parsed()) {
      if (accel_worst == "corresponding")
        eval.accel_worst = smoothnet::WorstAccelMode::kCorresponding;
      else if (accel_worst == "independent")
        eval.accel_worst = smoothnet::WorstAccelMode::kIndependent;
      else
        throw smoothnet::ConfigError("eval: accel-worst must be corresponding | independent");
      cli::cmd_eval(eval);
    } else if (bench_cmd->parsed()) {
      cli::cmd_bench(bench);
    }
  });
}
