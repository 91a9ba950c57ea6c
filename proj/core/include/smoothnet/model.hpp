#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "smoothnet/matrix.hpp"
#include "smoothnet/nn.hpp"
#include "smoothnet/rng.hpp"

namespace smoothnet {

enum class Variant { kBasic, kMotionAware };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct SmoothNetConfig {
  Variant variant = Variant::kMotionAware;
  std::size_t window_t = 32;
  std::size_t hidden = 256;
  std::size_t blocks = 1;  // residual blocks; per branch for motion_aware
  double leaky_slope = 0.01;
};

SmoothNetConfig default_config(Variant v);
void validate_config(const SmoothNetConfig& cfg);

// T frames per column; one column per (channel, batch item) pair, so the
// shared weights see every channel independently.
using WindowBatch = Matrix;

struct ResidualBlock {
  DenseLayer fc1;
  DenseLayer fc2;
};

struct Branch {
  DenseLayer encoder;
  std::vector<ResidualBlock> blocks;
  DenseLayer decoder;
};

// basic: a single branch (encoder T->H, blocks, decoder H->T).
// motion_aware: branches[0..2] = position/velocity/acceleration plus a
// linear fusion layer mapping the 3T concatenation back to T.
struct SmoothNetWeights {
  std::vector<Branch> branches;
  DenseLayer fusion;
};

SmoothNetWeights init_weights(const SmoothNetConfig& cfg, Rng& rng);
std::size_t param_count(const SmoothNetConfig& cfg);

// Stable name -> layer enumeration used by the optimizer and checkpoints.
std::vector<std::pair<std::string, DenseLayer*>> layer_entries(SmoothNetWeights& w);
std::vector<std::pair<std::string, const DenseLayer*>> layer_entries(const SmoothNetWeights& w);

// V_t = Y_t - Y_{t-1}: (T x cols) -> (T-1 x cols).
Matrix diff_velocity(const Matrix& y);
// A_t = V_t - V_{t-1}: (T-1 x cols) -> (T-2 x cols); composed with
// diff_velocity this is the 3-point second difference of the positions.
Matrix diff_acceleration(const Matrix& v);

Matrix forward_basic(const SmoothNetConfig& cfg, const SmoothNetWeights& w,
                     const WindowBatch& batch);
Matrix forward_motion_aware(const SmoothNetConfig& cfg, const SmoothNetWeights& w,
                            const WindowBatch& batch);
Matrix forward(const SmoothNetConfig& cfg, const SmoothNetWeights& w, const WindowBatch& batch);

// Mean |g_hat - y| over every entry.
double loss_pose(const Matrix& g_hat, const Matrix& y);
// Mean |second_diff(g_hat) - a_gt| over every entry; a_gt is (T-2) x cols.
double loss_accel(const Matrix& g_hat, const Matrix& a_gt);
// loss_pose + loss_accel with unit weights, acceleration target from y.
double loss_total(const Matrix& g_hat, const Matrix& y);

enum class LossMode { kPoseOnly, kAccelOnly, kPosePlusAccel };
std::string loss_mode_name(LossMode mode);
LossMode loss_mode_from_name(const std::string& name);

struct BlockGrad {
  DenseGrad fc1;
  DenseGrad fc2;
};

struct BranchGrad {
  DenseGrad encoder;
  std::vector<BlockGrad> blocks;
  DenseGrad decoder;
};

struct SmoothNetGrads {
  std::vector<BranchGrad> branches;
  DenseGrad fusion;
};

SmoothNetGrads zero_grads_like(const SmoothNetWeights& w);
// Same order as layer_entries; pair i corresponds to entry i.
std::vector<DenseGrad*> grad_entries(SmoothNetGrads& g);

struct LossValue {
  double total = 0.0;
  double pose = 0.0;
  double accel = 0.0;
};

// Forward + manual backward in one pass; accumulates parameter gradients
// of the selected loss into grads and returns the loss values (total
// reflects the mode; pose/accel are always reported).
LossValue loss_and_gradients(const SmoothNetConfig& cfg, const SmoothNetWeights& w,
                             const WindowBatch& noisy, const WindowBatch& clean, LossMode mode,
                             SmoothNetGrads& grads);

}  // namespace smoothnet
