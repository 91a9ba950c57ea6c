#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "smoothnet/checkpoint.hpp"
#include "smoothnet/errors.hpp"
#include "smoothnet/metrics.hpp"
#include "smoothnet/trainer.hpp"
#include "smoothnet/windowing.hpp"

using namespace smoothnet;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "smoothnet_test_trainer";
  std::filesystem::create_directories(dir);
  return dir;
}

Dataset tiny_dataset(double sigma, std::size_t count = 6, std::size_t length = 40,
                     std::size_t channels = 4) {
  MotionSpec motion;
  motion.length_l = length;
  motion.channels = channels;
  motion.num_sinusoids = 2;
  motion.max_freq = 2.0;
  motion.max_amp = 0.3;
  motion.fps = 50.0;
  motion.seed = 21;
  NoiseSpec noise;
  noise.kind = NoiseKind::kGaussianImpulsive;
  noise.p = 0.5;
  noise.sigma = sigma;
  noise.seed = 22;
  return make_dataset(motion, noise, count, 0.67);
}

TrainConfig tiny_config(LossMode mode = LossMode::kPosePlusAccel) {
  TrainConfig cfg;
  cfg.model.variant = Variant::kMotionAware;
  cfg.model.window_t = 8;
  cfg.model.hidden = 8;
  cfg.model.blocks = 1;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.seed = 5;
  cfg.loss = mode;
  cfg.eval_every = 2;
  cfg.steps_per_epoch_cap = 12;
  return cfg;
}

double probe_loss(const SmoothNetConfig& cfg, const SmoothNetWeights& w, const Dataset& data) {
  WindowSampler sampler(data.train, cfg.window_t, Rng(777));
  Matrix noisy, clean, accel;
  sampler.next_batch(32, noisy, clean, accel);
  return loss_pose(forward(cfg, w, noisy), clean);
}

}  // namespace

TEST_CASE("window sampler on a single exact-length sequence") {
  Dataset data;
  PoseSequence clean = make_generic_sequence(Matrix(8, 2), 50.0);
  for (std::size_t t = 0; t < 8; ++t)
    for (std::size_t c = 0; c < 2; ++c)
      clean.frames(t, c) = static_cast<double>(t * t) + static_cast<double>(c);
  data.train.push_back({clean, clean});

  WindowSampler sampler(data.train, 8, Rng(1));
  CHECK(sampler.total_positions() == 1);
  Matrix noisy, cleanb, accel;
  for (int draw = 0; draw < 5; ++draw) {
    sampler.next_batch(2, noisy, cleanb, accel);
    CHECK(noisy.rows == 8);
    CHECK(noisy.cols == 4);  // 2 channels x batch 2
    for (std::size_t t = 0; t < 8; ++t)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(cleanb(t, j) == clean.frames(t, j % 2));

    const Matrix expected = diff_acceleration(diff_velocity(cleanb));
    CHECK(accel.rows == 6);
    for (std::size_t i = 0; i < expected.size(); ++i)
      CHECK(accel.data[i] == expected.data[i]);
  }
}

TEST_CASE("window sampler skips too-short sequences and errors when empty") {
  Dataset data;
  PoseSequence tiny = make_generic_sequence(Matrix(4, 1), 50.0);
  data.train.push_back({tiny, tiny});
  CHECK_THROWS_AS(WindowSampler(data.train, 8, Rng(1)), ConfigError);

  PoseSequence ok = make_generic_sequence(Matrix(12, 1), 50.0);
  data.train.push_back({ok, ok});
  WindowSampler sampler(data.train, 8, Rng(1));
  CHECK(sampler.total_positions() == 5);
}

TEST_CASE("window sampler draws starts uniformly") {
  Dataset data;
  PoseSequence clean = make_generic_sequence(Matrix(17, 1), 50.0);
  for (std::size_t t = 0; t < 17; ++t) clean.frames(t, 0) = static_cast<double>(t);
  data.train.push_back({clean, clean});

  WindowSampler sampler(data.train, 8, Rng(3));
  CHECK(sampler.total_positions() == 10);
  std::vector<std::size_t> counts(10, 0);
  Matrix noisy, cleanb, accel;
  const std::size_t draws = 10000;
  for (std::size_t i = 0; i < draws; ++i) {
    sampler.next_batch(1, noisy, cleanb, accel);
    const auto start = static_cast<std::size_t>(noisy(0, 0));
    REQUIRE(start < 10);
    ++counts[start];
  }
  const double expected = static_cast<double>(draws) / 10.0;
  double chi2 = 0.0;
  for (std::size_t c : counts)
    chi2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  CHECK(chi2 < 27.9);  // 9 dof
}

TEST_CASE("training the copy task shrinks the loss and beats a random init") {
  const Dataset data = tiny_dataset(0.0);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 20;
  const TrainResult result = train(cfg, data);
  REQUIRE(result.log.entries.size() == 20);
  CHECK(!result.log.aborted);
  for (const auto& entry : result.log.entries) CHECK(std::isfinite(entry.loss));
  CHECK(result.log.entries.back().loss < 0.8 * result.log.entries.front().loss);

  Rng rng(999);
  const SmoothNetWeights random_init = init_weights(cfg.model, rng);
  const double untrained = probe_loss(cfg.model, random_init, data);
  const double trained = probe_loss(cfg.model, result.checkpoint.weights, data);
  CHECK(trained < 0.8 * untrained);
}

TEST_CASE("training log is finite with one row per epoch and decaying lr") {
  const Dataset data = tiny_dataset(0.02);
  const TrainConfig cfg = tiny_config();
  const TrainResult result = train(cfg, data);
  REQUIRE(result.log.entries.size() == static_cast<std::size_t>(cfg.epochs));
  for (int e = 0; e < cfg.epochs; ++e) {
    const TrainLogEntry& entry = result.log.entries[e];
    CHECK(entry.epoch == e);
    CHECK(std::isfinite(entry.loss));
    CHECK(entry.lr == doctest::Approx(lr_at_epoch(cfg.lr, e)));
  }
  // eval_every=2 on 3 epochs: epoch 0 has no eval yet (NaN), epoch 1 and the
  // final epoch carry evaluations.
  CHECK(std::isnan(result.log.entries[0].mpjpe));
  CHECK(std::isfinite(result.log.entries[1].mpjpe));
  CHECK(std::isfinite(result.log.entries[2].mpjpe));
  CHECK(result.checkpoint.meta.epochs == 3);
  CHECK(result.checkpoint.meta.seed == cfg.seed);
  CHECK(result.checkpoint.meta.final_loss ==
        doctest::Approx(result.log.entries.back().loss));
}

TEST_CASE("fixed seed reproduces bitwise-identical checkpoints") {
  const Dataset data = tiny_dataset(0.02);
  const TrainConfig cfg = tiny_config();
  const TrainResult a = train(cfg, data);
  const TrainResult b = train(cfg, data);
  CHECK(checkpoint_to_json(a.checkpoint) == checkpoint_to_json(b.checkpoint));
  CHECK(train_log_to_csv(a.log) == train_log_to_csv(b.log));
}

TEST_CASE("accel-only training yields worse test MPJPE than the combined loss") {
  const Dataset data = tiny_dataset(0.02);
  TrainConfig combined = tiny_config(LossMode::kPosePlusAccel);
  combined.epochs = 40;
  TrainConfig accel_only = combined;
  accel_only.loss = LossMode::kAccelOnly;

  const TrainResult rc = train(combined, data);
  const TrainResult ra = train(accel_only, data);
  const AggregateMetrics mc = evaluate_weights(combined.model, rc.checkpoint.weights, data.test);
  const AggregateMetrics ma = evaluate_weights(accel_only.model, ra.checkpoint.weights, data.test);
  CHECK(ma.mpjpe > mc.mpjpe);
}

TEST_CASE("evaluate_weights equals the per-sequence loop oracle") {
  const Dataset data = tiny_dataset(0.02);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 1;
  const TrainResult result = train(cfg, data);
  const AggregateMetrics agg =
      evaluate_weights(cfg.model, result.checkpoint.weights, data.test);
  CHECK(agg.sequences == data.test.size());

  double mpjpe_sum = 0.0;
  double pa_sum = 0.0;
  double accel_sum = 0.0;
  for (const auto& pair : data.test) {
    const PoseSequence smoothed =
        smooth_sequence(cfg.model, result.checkpoint.weights, pair.noisy, 1);
    const MetricsReport rep = evaluate(smoothed, pair.clean);
    mpjpe_sum += rep.mpjpe;
    pa_sum += rep.pa_mpjpe;
    accel_sum += rep.accel;
  }
  const double n = static_cast<double>(data.test.size());
  CHECK(agg.mpjpe == doctest::Approx(mpjpe_sum / n).epsilon(1e-12));
  CHECK(agg.pa_mpjpe == doctest::Approx(pa_sum / n).epsilon(1e-12));
  CHECK(agg.accel == doctest::Approx(accel_sum / n).epsilon(1e-12));
}

TEST_CASE("untrained model is worse than the clean input baseline") {
  const Dataset data = tiny_dataset(0.0);  // noisy == clean
  TrainConfig cfg = tiny_config();
  Rng rng(31337);
  const SmoothNetWeights untrained = init_weights(cfg.model, rng);
  const AggregateMetrics agg = evaluate_weights(cfg.model, untrained, data.test);
  double input_mpjpe = 0.0;
  for (const auto& pair : data.test) input_mpjpe += mpjpe(pair.noisy, pair.clean).first;
  input_mpjpe /= static_cast<double>(data.test.size());
  CHECK(input_mpjpe == 0.0);
  CHECK(agg.mpjpe > input_mpjpe);
}

TEST_CASE("identity model on clean pairs gives a near-zero report") {
  Dataset data;
  Rng rng(8);
  PoseSequence clean = make_generic_sequence(Matrix(24, 2), 50.0);
  for (auto& v : clean.frames.data) v = rng.uniform(0.1, 1.0);
  data.test.push_back({clean, clean});

  Checkpoint ckpt;
  ckpt.config.variant = Variant::kBasic;
  ckpt.config.window_t = 8;
  ckpt.config.hidden = 8;
  ckpt.config.blocks = 1;
  Rng init_rng(0);
  ckpt.weights = init_weights(ckpt.config, init_rng);
  ckpt.weights.branches[0].encoder.w = Matrix::identity(8);
  ckpt.weights.branches[0].encoder.b.assign(8, 0.0);
  ckpt.weights.branches[0].decoder.w = Matrix::identity(8);
  ckpt.weights.branches[0].decoder.b.assign(8, 0.0);
  for (auto& block : ckpt.weights.branches[0].blocks) {
    for (auto& v : block.fc1.w.data) v = 0.0;
    for (auto& v : block.fc1.b) v = 0.0;
    for (auto& v : block.fc2.w.data) v = 0.0;
    for (auto& v : block.fc2.b) v = 0.0;
  }

  const AggregateMetrics agg = evaluate_checkpoint(ckpt, data.test);
  CHECK(agg.mpjpe < 1e-12);
  CHECK(agg.accel < 1e-12);
  CHECK(agg.pa_mpjpe < 1e-10);
}

TEST_CASE("checkpoint JSON round-trip preserves structure at float precision") {
  TrainConfig cfg = tiny_config();
  Rng rng(9);
  Checkpoint ckpt;
  ckpt.config = cfg.model;
  ckpt.weights = init_weights(cfg.model, rng);
  ckpt.meta.epochs = 7;
  ckpt.meta.seed = 123;
  ckpt.meta.final_loss = 0.25;

  const std::string text = checkpoint_to_json(ckpt);
  const Checkpoint back = checkpoint_from_json(text);
  CHECK(back.config.variant == ckpt.config.variant);
  CHECK(back.config.window_t == ckpt.config.window_t);
  CHECK(back.config.hidden == ckpt.config.hidden);
  CHECK(back.config.blocks == ckpt.config.blocks);
  CHECK(back.meta.epochs == 7);
  CHECK(back.meta.seed == 123);

  const auto orig = layer_entries(ckpt.weights);
  const auto loaded = layer_entries(back.weights);
  REQUIRE(orig.size() == loaded.size());
  for (std::size_t i = 0; i < orig.size(); ++i) {
    CHECK(orig[i].first == loaded[i].first);
    for (std::size_t j = 0; j < orig[i].second->w.size(); ++j) {
      const double want = static_cast<double>(static_cast<float>(orig[i].second->w.data[j]));
      CHECK(loaded[i].second->w.data[j] == want);
    }
  }

  // Serializing the parsed checkpoint reproduces the document byte for byte.
  CHECK(checkpoint_to_json(back) == text);
}

TEST_CASE("checkpoint parsing errors name the offender") {
  TrainConfig cfg = tiny_config();
  Rng rng(10);
  Checkpoint ckpt;
  ckpt.config = cfg.model;
  ckpt.weights = init_weights(cfg.model, rng);
  const std::string text = checkpoint_to_json(ckpt);

  SUBCASE("missing tensor") {
    std::string damaged = text;
    const auto pos = damaged.find("\"fusion.bias\"");
    REQUIRE(pos != std::string::npos);
    damaged.replace(pos, 13, "\"fusion.other\"");
    try {
      checkpoint_from_json(damaged);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("fusion.bias") != std::string::npos);
    }
  }

  SUBCASE("bad format version") {
    std::string damaged = text;
    const auto pos = damaged.find("\"format_version\":1");
    REQUIRE(pos != std::string::npos);
    damaged.replace(pos, 18, "\"format_version\":2");
    CHECK_THROWS_AS(checkpoint_from_json(damaged), ParseError);
  }
}

TEST_CASE("checkpoint file round trip evaluates identically within 1e-5") {
  const Dataset data = tiny_dataset(0.02);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 2;
  const TrainResult result = train(cfg, data);

  const auto path = (temp_dir() / "ckpt.json").string();
  save_checkpoint(path, result.checkpoint);
  const Checkpoint loaded = load_checkpoint(path);

  const AggregateMetrics in_memory =
      evaluate_weights(cfg.model, result.checkpoint.weights, data.test);
  const AggregateMetrics from_disk = evaluate_checkpoint(loaded, data.test);
  CHECK(std::abs(in_memory.mpjpe - from_disk.mpjpe) < 1e-5);
  CHECK(std::abs(in_memory.pa_mpjpe - from_disk.pa_mpjpe) < 1e-5);
  CHECK(std::abs(in_memory.accel - from_disk.accel) < 1e-5);
  CHECK(std::abs(in_memory.mpjpe_worst1 - from_disk.mpjpe_worst1) < 1e-5);
  CHECK(std::abs(in_memory.accel_worst1 - from_disk.accel_worst1) < 1e-5);
}

TEST_CASE("train config JSON parsing, defaults and errors") {
  const std::string full = R"({
    "model": {"variant": "basic", "window_t": 16, "hidden": 32, "blocks": 2},
    "epochs": 9, "batch_size": 64, "lr": {"initial": 0.002, "decay": 0.9},
    "seed": 77, "loss": "pose_only", "eval_every": 3,
    "steps_per_epoch_cap": 100, "clip_grad": false})";
  const TrainConfig cfg = train_config_from_json(full);
  CHECK(cfg.model.variant == Variant::kBasic);
  CHECK(cfg.model.window_t == 16);
  CHECK(cfg.model.hidden == 32);
  CHECK(cfg.model.blocks == 2);
  CHECK(cfg.epochs == 9);
  CHECK(cfg.batch_size == 64);
  CHECK(cfg.lr.initial_lr == 0.002);
  CHECK(cfg.lr.decay_rate == 0.9);
  CHECK(cfg.seed == 77);
  CHECK(cfg.loss == LossMode::kPoseOnly);
  CHECK(cfg.eval_every == 3);
  CHECK(cfg.steps_per_epoch_cap == 100);
  CHECK(cfg.clip_grad == false);

  const TrainConfig defaults =
      train_config_from_json(R"({"model": {"variant": "motion_aware"}})");
  CHECK(defaults.model.window_t == 32);
  CHECK(defaults.epochs == 70);
  CHECK(defaults.batch_size == 128);
  CHECK(defaults.loss == LossMode::kPosePlusAccel);

  try {
    train_config_from_json(R"({"epochs": 3})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("model") != std::string::npos);
  }
  try {
    train_config_from_json(R"({"model": {"window_t": 8}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("variant") != std::string::npos);
  }

  const TrainConfig round = train_config_from_json(train_config_to_json(cfg));
  CHECK(round.model.variant == cfg.model.variant);
  CHECK(round.epochs == cfg.epochs);
  CHECK(round.lr.decay_rate == cfg.lr.decay_rate);
  CHECK(round.clip_grad == cfg.clip_grad);
}

TEST_CASE("train log CSV shape") {
  TrainLog log;
  log.entries.push_back({0, 0.5, 0.1, 0.01, 0.001, 1.5});
  log.entries.push_back({1, 0.4, std::nan(""), 0.009, 0.00095, 1.4});
  const std::string csv = train_log_to_csv(log);
  CHECK(csv.rfind("epoch,loss,mpjpe,accel,lr", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);  // header + 2 rows
}
