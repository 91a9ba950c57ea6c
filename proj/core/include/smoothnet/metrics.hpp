#pragma once

#include <utility>
#include <vector>

#include "smoothnet/matrix.hpp"
#include "smoothnet/pose_sequence.hpp"

namespace smoothnet {

struct MetricsReport {
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  double accel = 0.0;
  double mpjpe_worst1 = 0.0;
  double accel_worst1 = 0.0;
  std::vector<double> per_frame_mpjpe;  // length L
  std::vector<double> per_frame_accel;  // length L-2, frames 1..L-2
};

// Mean over joints of the Euclidean error per frame, then over frames.
// Generic layouts treat each channel as a 1-D joint.
std::pair<double, std::vector<double>> mpjpe(const PoseSequence& pred, const PoseSequence& gt);

// Similarity transform s*R*pred + t (rotation only, det(R) = +1) minimizing
// the Frobenius distance to gt; frames are N x D with D in {2, 3}.
// Throws AlignmentError when pred is degenerate (all joints coincident).
Matrix procrustes_align(const Matrix& pred_frame, const Matrix& gt_frame);

// MPJPE after per-frame Procrustes alignment; degenerate frames are skipped
// with a diagnostic on stderr.
double pa_mpjpe(const PoseSequence& pred, const PoseSequence& gt);

// Mean joint error of 3-point second differences; per-frame series covers
// frames 1..L-2.
std::pair<double, std::vector<double>> accel_error(const PoseSequence& pred,
                                                   const PoseSequence& gt);

struct WorstResult {
  double worst_main = 0.0;
  double worst_companion = 0.0;
  bool has_companion = false;
};

// Mean of the ceil(fraction*len) largest per-frame values, plus the mean of
// the companion series at those frames. NaN companion entries mark frames
// where the companion is undefined and are dropped from its mean.
WorstResult worst_percent(const std::vector<double>& per_frame, double fraction,
                          const std::vector<double>* companion = nullptr);

enum class WorstAccelMode { kCorresponding, kIndependent };

// Full report; accel_worst1 follows mode: the accel at the worst-MPJPE
// frames (corresponding) or the worst accel frames themselves (independent).
MetricsReport evaluate(const PoseSequence& pred, const PoseSequence& gt,
                       WorstAccelMode mode = WorstAccelMode::kCorresponding);

}  // namespace smoothnet
