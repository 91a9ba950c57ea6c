#include "smoothnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smoothnet/errors.hpp"
#include "smoothnet/io_util.hpp"
#include "smoothnet/metrics.hpp"
#include "smoothnet/parallel.hpp"
#include "smoothnet/windowing.hpp"

namespace smoothnet {

using nlohmann::json;

void validate_train_config(const TrainConfig& cfg) {
  validate_config(cfg.model);
  if (cfg.epochs < 1) throw ConfigError("train config: epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (!(cfg.lr.initial_lr > 0.0)) throw ConfigError("train config: lr.initial must be > 0");
  if (!(cfg.lr.decay_rate > 0.0 && cfg.lr.decay_rate <= 1.0)) {
    throw ConfigError("train config: lr.decay must be in (0, 1]");
  }
  if (cfg.eval_every < 1) throw ConfigError("train config: eval_every must be >= 1");
  if (cfg.steps_per_epoch_cap < 1) {
    throw ConfigError("train config: steps_per_epoch_cap must be >= 1");
  }
  if (!(cfg.clip_norm > 0.0)) throw ConfigError("train config: clip_norm must be > 0");
}

TrainConfig train_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("train config: ") + e.what());
  }
  try {
    if (!doc.contains("model")) throw ConfigError("train config: missing key 'model'");
    const auto& jm = doc.at("model");
    if (!jm.contains("variant")) throw ConfigError("train config: missing key 'model.variant'");
    TrainConfig cfg;
    cfg.model = default_config(variant_from_name(jm.at("variant").get<std::string>()));
    cfg.model.window_t = jm.value("window_t", cfg.model.window_t);
    cfg.model.hidden = jm.value("hidden", cfg.model.hidden);
    cfg.model.blocks = jm.value("blocks", cfg.model.blocks);
    cfg.model.leaky_slope = jm.value("leaky_slope", cfg.model.leaky_slope);
    cfg.epochs = doc.value("epochs", cfg.epochs);
    cfg.batch_size = doc.value("batch_size", cfg.batch_size);
    if (doc.contains("lr")) {
      const auto& jl = doc.at("lr");
      cfg.lr.initial_lr = jl.value("initial", cfg.lr.initial_lr);
      cfg.lr.decay_rate = jl.value("decay", cfg.lr.decay_rate);
    }
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("loss")) cfg.loss = loss_mode_from_name(doc.at("loss").get<std::string>());
    cfg.eval_every = doc.value("eval_every", cfg.eval_every);
    cfg.steps_per_epoch_cap = doc.value("steps_per_epoch_cap", cfg.steps_per_epoch_cap);
    cfg.clip_grad = doc.value("clip_grad", cfg.clip_grad);
    cfg.clip_norm = doc.value("clip_norm", cfg.clip_norm);
    validate_train_config(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("train config: ") + e.what());
  }
}

std::string train_config_to_json(const TrainConfig& cfg) {
  json doc;
  doc["model"] = {{"variant", variant_name(cfg.model.variant)},
                  {"window_t", cfg.model.window_t},
                  {"hidden", cfg.model.hidden},
                  {"blocks", cfg.model.blocks},
                  {"leaky_slope", cfg.model.leaky_slope}};
  doc["epochs"] = cfg.epochs;
  doc["batch_size"] = cfg.batch_size;
  doc["lr"] = {{"initial", cfg.lr.initial_lr}, {"decay", cfg.lr.decay_rate}};
  doc["seed"] = cfg.seed;
  doc["loss"] = loss_mode_name(cfg.loss);
  doc["eval_every"] = cfg.eval_every;
  doc["steps_per_epoch_cap"] = cfg.steps_per_epoch_cap;
  doc["clip_grad"] = cfg.clip_grad;
  doc["clip_norm"] = cfg.clip_norm;
  return doc.dump(2);
}

TrainConfig load_train_config(const std::string& path) {
  return train_config_from_json(read_file(path));
}

std::string train_log_to_csv(const TrainLog& log) {
  std::ostringstream out;
  out << "epoch,loss,mpjpe,accel,lr\n";
  char buf[40];
  for (const auto& e : log.entries) {
    out << e.epoch;
    for (double v : {e.loss, e.mpjpe, e.accel, e.lr}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
  return out.str();
}

void save_train_log(const std::string& path, const TrainLog& log) {
  write_file_atomic(path, train_log_to_csv(log));
}

WindowSampler::WindowSampler(const std::vector<SequencePair>& pairs, std::size_t window_t,
                             Rng rng)
    : pairs_(&pairs), window_t_(window_t), rng_(rng) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    if (pair.noisy.length() != pair.clean.length() ||
        pair.noisy.channels() != pair.clean.channels()) {
      throw ShapeError("sampler: pair " + std::to_string(i) + " noisy/clean shapes differ");
    }
    if (pair.clean.length() < window_t) {
      std::fprintf(stderr, "sampler: skipping sequence %zu (length %zu < window %zu)\n", i,
                   pair.clean.length(), window_t);
      continue;
    }
    if (channels_ == 0) {
      channels_ = pair.clean.channels();
    } else if (pair.clean.channels() != channels_) {
      throw ShapeError("sampler: inconsistent channel counts across sequences");
    }
    usable_.push_back(i);
    cumulative_.push_back(total_);
    total_ += pair.clean.length() - window_t + 1;
  }
  if (total_ == 0) throw ConfigError("sampler: no usable training sequences");
}

void WindowSampler::next_batch(std::size_t batch, Matrix& noisy, Matrix& clean,
                               Matrix& accel_gt) {
  const std::size_t cols = channels_ * batch;
  noisy = Matrix(window_t_, cols);
  clean = Matrix(window_t_, cols);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t pos = rng_.uniform_index(total_);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), pos);
    const std::size_t si = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const std::size_t start = pos - cumulative_[si];
    const auto& pair = (*pairs_)[usable_[si]];
    for (std::size_t j = 0; j < window_t_; ++j) {
      const double* nsrc = pair.noisy.frames.row_ptr(start + j);
      const double* csrc = pair.clean.frames.row_ptr(start + j);
      std::copy(nsrc, nsrc + channels_, noisy.row_ptr(j) + b * channels_);
      std::copy(csrc, csrc + channels_, clean.row_ptr(j) + b * channels_);
    }
  }
  accel_gt = window_t_ >= 3 ? diff_acceleration(diff_velocity(clean)) : Matrix(0, cols);
}

namespace {

std::vector<std::vector<double>*> grad_vectors(std::vector<DenseGrad*>& grads) {
  std::vector<std::vector<double>*> out;
  out.reserve(2 * grads.size());
  for (auto* g : grads) {
    out.push_back(&g->w.data);
    out.push_back(&g->b);
  }
  return out;
}

void zero_grads(std::vector<DenseGrad*>& grads) {
  for (auto* g : grads) {
    std::fill(g->w.data.begin(), g->w.data.end(), 0.0);
    std::fill(g->b.begin(), g->b.end(), 0.0);
  }
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const Dataset& data) {
  validate_train_config(cfg);
  Rng root(cfg.seed);
  WindowSampler sampler(data.train, cfg.model.window_t, root.child(1));
  Rng init_rng = root.child(2);

  TrainResult result;
  result.checkpoint.config = cfg.model;
  result.checkpoint.meta.seed = cfg.seed;
  SmoothNetWeights weights = init_weights(cfg.model, init_rng);
  SmoothNetWeights last_good = weights;
  int last_good_epoch = 0;

  auto layers = layer_entries(weights);
  std::vector<AdamState> states(2 * layers.size());
  SmoothNetGrads grads = zero_grads_like(weights);
  auto gentries = grad_entries(grads);
  auto gvectors = grad_vectors(gentries);

  const std::size_t steps =
      std::min(cfg.steps_per_epoch_cap,
               (sampler.total_positions() + cfg.batch_size - 1) / cfg.batch_size);

  Matrix noisy, clean, accel_gt;
  double last_mpjpe = std::nan(""), last_accel = std::nan("");
  const auto t0 = std::chrono::steady_clock::now();
  bool aborted = false;

  for (int epoch = 0; epoch < cfg.epochs && !aborted; ++epoch) {
    const double lr = lr_at_epoch(cfg.lr, epoch);
    double loss_sum = 0.0;
    std::size_t finished_steps = 0;
    for (std::size_t step = 0; step < steps; ++step) {
      sampler.next_batch(cfg.batch_size, noisy, clean, accel_gt);
      zero_grads(gentries);
      LossValue lv;
      try {
        lv = loss_and_gradients(cfg.model, weights, noisy, clean, cfg.loss, grads);
        if (!std::isfinite(lv.total)) throw NumericError("non-finite loss");
        if (cfg.clip_grad) clip_global_norm(gvectors, cfg.clip_norm);
        for (std::size_t i = 0; i < layers.size(); ++i) {
          adam_step(layers[i].second->w.data, gentries[i]->w.data, states[2 * i], lr);
          adam_step(layers[i].second->b, gentries[i]->b, states[2 * i + 1], lr);
        }
      } catch (const NumericError& e) {
        std::fprintf(stderr, "train: aborting at epoch %d step %zu: %s\n", epoch, step,
                     e.what());
        aborted = true;
        break;
      }
      loss_sum += lv.total;
      ++finished_steps;
    }
    if (aborted) break;

    const double epoch_loss = loss_sum / static_cast<double>(finished_steps);
    const bool eval_now =
        !data.test.empty() && ((epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs);
    if (eval_now) {
      const AggregateMetrics agg = evaluate_weights(cfg.model, weights, data.test);
      last_mpjpe = agg.mpjpe;
      last_accel = agg.accel;
    }
    TrainLogEntry entry;
    entry.epoch = epoch;
    entry.loss = epoch_loss;
    entry.mpjpe = last_mpjpe;
    entry.accel = last_accel;
    entry.lr = lr;
    entry.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.entries.push_back(entry);

    last_good = weights;
    last_good_epoch = epoch + 1;
    result.checkpoint.meta.final_loss = epoch_loss;
  }

  result.log.aborted = aborted;
  result.checkpoint.weights = aborted ? last_good : weights;
  result.checkpoint.meta.epochs = last_good_epoch;
  return result;
}

AggregateMetrics evaluate_weights(const SmoothNetConfig& cfg, const SmoothNetWeights& weights,
                                  const std::vector<SequencePair>& pairs) {
  if (pairs.empty()) throw ConfigError("evaluate: empty sequence set");
  std::vector<MetricsReport> reports(pairs.size());
  detail::parallel_chunks(pairs.size(), 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const PoseSequence smoothed = smooth_sequence(cfg, weights, pairs[i].noisy, 1);
      reports[i] = evaluate(smoothed, pairs[i].clean);
    }
  });
  AggregateMetrics agg;
  for (const auto& r : reports) {
    agg.mpjpe += r.mpjpe;
    agg.pa_mpjpe += r.pa_mpjpe;
    agg.accel += r.accel;
    agg.mpjpe_worst1 += r.mpjpe_worst1;
    agg.accel_worst1 += r.accel_worst1;
  }
  const auto n = static_cast<double>(pairs.size());
  agg.mpjpe /= n;
  agg.pa_mpjpe /= n;
  agg.accel /= n;
  agg.mpjpe_worst1 /= n;
  agg.accel_worst1 /= n;
  agg.sequences = pairs.size();
  return agg;
}

AggregateMetrics evaluate_checkpoint(const Checkpoint& ckpt,
                                     const std::vector<SequencePair>& pairs) {
  return evaluate_weights(ckpt.config, ckpt.weights, pairs);
}

}  // namespace smoothnet
