#include "smoothnet/nn.hpp"

#include <cmath>

#include "smoothnet/errors.hpp"

namespace smoothnet {

DenseLayer init_dense(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  if (in_dim == 0 || out_dim == 0) throw ConfigError("init_dense: dims must be >= 1");
  DenseLayer layer;
  layer.w = Matrix(out_dim, in_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (auto& v : layer.w.data) v = rng.uniform(-bound, bound);
  layer.b.assign(out_dim, 0.0);
  return layer;
}

DenseGrad zero_grad_like(const DenseLayer& layer) {
  DenseGrad g;
  g.w = Matrix(layer.w.rows, layer.w.cols);
  g.b.assign(layer.b.size(), 0.0);
  return g;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x) {
  Matrix y = matmul(layer.w, x);
  for (std::size_t i = 0; i < y.rows; ++i) {
    double* yi = y.row_ptr(i);
    const double bi = layer.b[i];
    for (std::size_t j = 0; j < y.cols; ++j) yi[j] += bi;
  }
  return y;
}

Matrix dense_backward(const DenseLayer& layer, const Matrix& x, const Matrix& grad_y,
                      DenseGrad& grad) {
  if (grad_y.rows != layer.w.rows || x.rows != layer.w.cols || grad_y.cols != x.cols) {
    throw ShapeError("dense_backward: mismatched activation shapes");
  }
  Matrix gw = matmul_abt(grad_y, x);
  for (std::size_t i = 0; i < gw.data.size(); ++i) grad.w.data[i] += gw.data[i];
  for (std::size_t i = 0; i < grad_y.rows; ++i) {
    const double* gi = grad_y.row_ptr(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < grad_y.cols; ++j) acc += gi[j];
    grad.b[i] += acc;
  }
  return matmul_atb(layer.w, grad_y);
}

Matrix leaky_relu(const Matrix& x, double slope) {
  Matrix y(x.rows, x.cols);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const double v = x.data[i];
    y.data[i] = v > 0.0 ? v : slope * v;
  }
  return y;
}

Matrix leaky_relu_backward(const Matrix& pre, const Matrix& grad_y, double slope) {
  if (pre.rows != grad_y.rows || pre.cols != grad_y.cols) {
    throw ShapeError("leaky_relu_backward: shape mismatch");
  }
  Matrix gx(pre.rows, pre.cols);
  for (std::size_t i = 0; i < pre.data.size(); ++i) {
    gx.data[i] = grad_y.data[i] * (pre.data[i] > 0.0 ? 1.0 : slope);
  }
  return gx;
}

void adam_step(std::vector<double>& param, const std::vector<double>& grad, AdamState& state,
               double lr) {
  if (param.size() != grad.size()) throw ShapeError("adam_step: param/grad size mismatch");
  for (double g : grad) {
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
  }
  if (state.m.empty()) {
    state.m.assign(param.size(), 0.0);
    state.v.assign(param.size(), 0.0);
  }
  if (state.m.size() != param.size()) throw ShapeError("adam_step: stale optimizer state");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

double lr_at_epoch(const LrSchedule& sched, int epoch) {
  return sched.initial_lr * std::pow(sched.decay_rate, static_cast<double>(epoch));
}

double clip_global_norm(const std::vector<std::vector<double>*>& grads, double max_norm) {
  double norm_sq = 0.0;
  for (const auto* g : grads) {
    for (double v : *g) norm_sq += v * v;
  }
  const double norm = std::sqrt(norm_sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto* g : grads) {
      for (double& v : *g) v *= scale;
    }
  }
  return norm;
}

}  // namespace smoothnet
