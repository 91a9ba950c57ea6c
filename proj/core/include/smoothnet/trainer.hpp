#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothnet/checkpoint.hpp"
#include "smoothnet/model.hpp"
#include "smoothnet/rng.hpp"
#include "smoothnet/synth.hpp"

namespace smoothnet {

struct TrainConfig {
  SmoothNetConfig model;
  int epochs = 70;
  std::size_t batch_size = 128;
  LrSchedule lr{1e-3, 0.95};
  std::uint64_t seed = 0;
  LossMode loss = LossMode::kPosePlusAccel;
  int eval_every = 10;
  // Steps per epoch = ceil(window positions / batch_size), capped here.
  std::size_t steps_per_epoch_cap = 500;
  bool clip_grad = true;
  double clip_norm = 1.0;
};

void validate_train_config(const TrainConfig& cfg);
// JSON file shape: {"model": {"variant", "window_t", "hidden", "blocks",
// "leaky_slope"}, "epochs", "batch_size", "lr": {"initial", "decay"},
// "seed", "loss", "eval_every", "steps_per_epoch_cap", "clip_grad"}.
// Only "model" (with "variant") is required; the rest default.
TrainConfig train_config_from_json(const std::string& text);
std::string train_config_to_json(const TrainConfig& cfg);
TrainConfig load_train_config(const std::string& path);

struct TrainLogEntry {
  int epoch = 0;
  double loss = 0.0;
  double mpjpe = 0.0;  // carried forward between evals; NaN before the first
  double accel = 0.0;
  double lr = 0.0;
  double wall_s = 0.0;
};

struct TrainLog {
  std::vector<TrainLogEntry> entries;
  bool aborted = false;
};

std::string train_log_to_csv(const TrainLog& log);
void save_train_log(const std::string& path, const TrainLog& log);

// Uniform sampler over every (sequence, start) window position of the
// usable training pairs; too-short sequences are skipped with a stderr
// diagnostic.
class WindowSampler {
 public:
  WindowSampler(const std::vector<SequencePair>& pairs, std::size_t window_t, Rng rng);

  std::size_t total_positions() const { return total_; }
  std::size_t channels() const { return channels_; }

  // Fills T x (C*batch) noisy/clean batches and the (T-2) x (C*batch)
  // clean acceleration targets.
  void next_batch(std::size_t batch, Matrix& noisy, Matrix& clean, Matrix& accel_gt);

 private:
  const std::vector<SequencePair>* pairs_;
  std::vector<std::size_t> usable_;
  std::vector<std::size_t> cumulative_;  // positions before each usable seq
  std::size_t window_t_;
  std::size_t channels_ = 0;
  std::size_t total_ = 0;
  Rng rng_;
};

struct AggregateMetrics {
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  double accel = 0.0;
  double mpjpe_worst1 = 0.0;
  double accel_worst1 = 0.0;
  std::size_t sequences = 0;
};

struct TrainResult {
  Checkpoint checkpoint;
  TrainLog log;
};

// Adam training on sampled windows; deterministic per seed. A non-finite
// loss aborts and returns the weights from the last fully finite epoch.
TrainResult train(const TrainConfig& cfg, const Dataset& data);

// Smooths every pair's noisy sequence (step 1) and aggregates the metric
// scalars by unweighted mean over sequences.
AggregateMetrics evaluate_weights(const SmoothNetConfig& cfg, const SmoothNetWeights& weights,
                                  const std::vector<SequencePair>& pairs);
AggregateMetrics evaluate_checkpoint(const Checkpoint& ckpt,
                                     const std::vector<SequencePair>& pairs);

}  // namespace smoothnet
