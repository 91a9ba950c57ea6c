#pragma once

#include <cstddef>
#include <vector>

#include "smoothnet/model.hpp"
#include "smoothnet/pose_sequence.hpp"

namespace smoothnet {

struct WindowPlan {
  std::size_t length_l = 0;
  std::size_t window_t = 0;
  std::size_t step_s = 1;
  std::vector<std::size_t> starts;
};

// Starts at 0, s, 2s, ...; when the stride overshoots, a final window
// anchored at L-T keeps the tail covered.
WindowPlan plan_windows(std::size_t length_l, std::size_t window_t, std::size_t step_s);

enum class MergeWeighting { kUniform, kTriangular };

// Averages the refined T x C chunks back into an L x C series; every output
// frame is the (weighted) mean of the windows covering it.
Matrix merge_overlap_average(const std::vector<Matrix>& windows, const WindowPlan& plan,
                             MergeWeighting weighting = MergeWeighting::kUniform);

// plan -> batched per-window forward -> overlap-average merge. Sequences
// shorter than T are reflect-padded to T and cropped after smoothing.
PoseSequence smooth_sequence(const SmoothNetConfig& cfg, const SmoothNetWeights& weights,
                             const PoseSequence& seq, std::size_t step_s,
                             MergeWeighting weighting = MergeWeighting::kUniform);

}  // namespace smoothnet
