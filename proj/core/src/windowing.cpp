#include "smoothnet/windowing.hpp"

#include <algorithm>

#include "smoothnet/errors.hpp"

namespace smoothnet {

WindowPlan plan_windows(std::size_t length_l, std::size_t window_t, std::size_t step_s) {
  if (window_t < 1) throw ConfigError("plan_windows: window_t must be >= 1");
  if (step_s < 1 || step_s > window_t) {
    throw ConfigError("plan_windows: need 1 <= step_s <= window_t");
  }
  if (length_l < window_t) {
    throw ShapeError("plan_windows: sequence length " + std::to_string(length_l) +
                     " shorter than window " + std::to_string(window_t));
  }
  WindowPlan plan;
  plan.length_l = length_l;
  plan.window_t = window_t;
  plan.step_s = step_s;
  for (std::size_t start = 0; start + window_t <= length_l; start += step_s) {
    plan.starts.push_back(start);
  }
  if (plan.starts.back() != length_l - window_t) {
    plan.starts.push_back(length_l - window_t);
  }
  return plan;
}

Matrix merge_overlap_average(const std::vector<Matrix>& windows, const WindowPlan& plan,
                             MergeWeighting weighting) {
  if (windows.size() != plan.starts.size()) {
    throw ShapeError("merge_overlap_average: expected " + std::to_string(plan.starts.size()) +
                     " chunks, got " + std::to_string(windows.size()));
  }
  const std::size_t t_len = plan.window_t;
  const std::size_t cols = windows.empty() ? 0 : windows.front().cols;
  for (const auto& w : windows) {
    if (w.rows != t_len || w.cols != cols) {
      throw ShapeError("merge_overlap_average: chunk shape mismatch");
    }
  }
  std::vector<double> frame_weight(t_len, 1.0);
  if (weighting == MergeWeighting::kTriangular) {
    for (std::size_t j = 0; j < t_len; ++j) {
      frame_weight[j] = static_cast<double>(std::min(j + 1, t_len - j));
    }
  }
  Matrix sum(plan.length_l, cols);
  std::vector<double> total_weight(plan.length_l, 0.0);
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    const std::size_t start = plan.starts[wi];
    for (std::size_t j = 0; j < t_len; ++j) {
      const double weight = frame_weight[j];
      const double* src = windows[wi].row_ptr(j);
      double* dst = sum.row_ptr(start + j);
      for (std::size_t c = 0; c < cols; ++c) dst[c] += weight * src[c];
      total_weight[start + j] += weight;
    }
  }
  for (std::size_t t = 0; t < plan.length_l; ++t) {
    if (total_weight[t] <= 0.0) {
      throw ShapeError("merge_overlap_average: frame " + std::to_string(t) + " uncovered");
    }
    double* row = sum.row_ptr(t);
    for (std::size_t c = 0; c < cols; ++c) row[c] /= total_weight[t];
  }
  return sum;
}

namespace {

// Whole-sample mirror index, as in the filter boundary handling.
std::size_t reflect_index(std::size_t i, std::size_t length) {
  if (length == 1) return 0;
  const std::size_t period = 2 * length - 2;
  std::size_t m = i % period;
  return m < length ? m : period - m;
}

constexpr std::size_t kInferBatch = 64;

}  // namespace

PoseSequence smooth_sequence(const SmoothNetConfig& cfg, const SmoothNetWeights& weights,
                             const PoseSequence& seq, std::size_t step_s,
                             MergeWeighting weighting) {
  validate_sequence(seq);
  validate_config(cfg);
  const std::size_t t_len = cfg.window_t;
  const std::size_t orig_len = seq.length();
  const std::size_t channels = seq.channels();

  const Matrix* frames = &seq.frames;
  Matrix padded;
  if (orig_len < t_len) {
    padded = Matrix(t_len, channels);
    for (std::size_t t = 0; t < t_len; ++t) {
      const double* src = seq.frames.row_ptr(reflect_index(t, orig_len));
      std::copy(src, src + channels, padded.row_ptr(t));
    }
    frames = &padded;
  }
  const std::size_t length = frames->rows;

  const WindowPlan plan = plan_windows(length, t_len, std::min(step_s, t_len));
  std::vector<Matrix> refined(plan.starts.size());
  for (std::size_t base = 0; base < plan.starts.size(); base += kInferBatch) {
    const std::size_t group = std::min(kInferBatch, plan.starts.size() - base);
    Matrix batch(t_len, channels * group);
    for (std::size_t b = 0; b < group; ++b) {
      const std::size_t start = plan.starts[base + b];
      for (std::size_t j = 0; j < t_len; ++j) {
        const double* src = frames->row_ptr(start + j);
        double* dst = batch.row_ptr(j) + b * channels;
        std::copy(src, src + channels, dst);
      }
    }
    const Matrix out = forward(cfg, weights, batch);
    for (std::size_t b = 0; b < group; ++b) {
      Matrix chunk(t_len, channels);
      for (std::size_t j = 0; j < t_len; ++j) {
        const double* src = out.row_ptr(j) + b * channels;
        std::copy(src, src + channels, chunk.row_ptr(j));
      }
      refined[base + b] = std::move(chunk);
    }
  }

  Matrix merged = merge_overlap_average(refined, plan, weighting);
  PoseSequence result = seq;
  if (orig_len < t_len) {
    Matrix cropped(orig_len, channels);
    for (std::size_t t = 0; t < orig_len; ++t) {
      const double* src = merged.row_ptr(t);
      std::copy(src, src + channels, cropped.row_ptr(t));
    }
    result.frames = std::move(cropped);
  } else {
    result.frames = std::move(merged);
  }
  return result;
}

}  // namespace smoothnet
