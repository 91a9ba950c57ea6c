#pragma once

#include <cstdint>
#include <vector>

#include "smoothnet/matrix.hpp"
#include "smoothnet/rng.hpp"

namespace smoothnet {

// Fully connected layer acting on column batches: activations are
// (features x columns) matrices where every column is one independent
// channel, so the same weights serve any batch width.
struct DenseLayer {
  Matrix w;               // out_dim x in_dim
  std::vector<double> b;  // out_dim
};

struct DenseGrad {
  Matrix w;
  std::vector<double> b;
};

// Uniform init on +/- 1/sqrt(in_dim), zero bias.
DenseLayer init_dense(std::size_t in_dim, std::size_t out_dim, Rng& rng);
DenseGrad zero_grad_like(const DenseLayer& layer);

// y = W x + b, bias broadcast across columns.
Matrix dense_forward(const DenseLayer& layer, const Matrix& x);

// Accumulates dW += dy x^T and db += row sums of dy, returns dx = W^T dy.
Matrix dense_backward(const DenseLayer& layer, const Matrix& x, const Matrix& grad_y,
                      DenseGrad& grad);

Matrix leaky_relu(const Matrix& x, double slope);
// pre is the pre-activation input that was fed to leaky_relu.
Matrix leaky_relu_backward(const Matrix& pre, const Matrix& grad_y, double slope);

// One first/second-moment pair per tensor; t counts this tensor's updates
// and drives the bias correction.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(std::vector<double>& param, const std::vector<double>& grad, AdamState& state,
               double lr);

struct LrSchedule {
  double initial_lr = 1e-3;
  double decay_rate = 0.95;
};

double lr_at_epoch(const LrSchedule& sched, int epoch);

// Scales all gradients so their joint L2 norm is at most max_norm;
// returns the norm before clipping.
double clip_global_norm(const std::vector<std::vector<double>*>& grads, double max_norm);

}  // namespace smoothnet
