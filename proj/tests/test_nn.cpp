#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "smoothnet/errors.hpp"
#include "smoothnet/nn.hpp"

using namespace smoothnet;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (auto& v : m.data) v = rng.uniform(-1.0, 1.0);
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows == b.rows);
  REQUIRE(a.cols == b.cols);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

// Scalar loss used by the finite-difference checks: sum of 0.5 * y^2 so
// that dL/dy = y.
double half_square_sum(const Matrix& y) {
  double acc = 0.0;
  for (double v : y.data) acc += 0.5 * v * v;
  return acc;
}

}  // namespace

TEST_CASE("dense_forward identity passthrough") {
  DenseLayer layer;
  layer.w = Matrix::identity(3);
  layer.b.assign(3, 0.0);
  Rng rng(1);
  const Matrix x = random_matrix(3, 5, rng);
  CHECK(max_abs_diff(dense_forward(layer, x), x) == 0.0);
}

TEST_CASE("dense_forward hand example") {
  DenseLayer layer;
  layer.w = Matrix(1, 2);
  layer.w(0, 0) = 1.0;
  layer.w(0, 1) = 1.0;
  layer.b = {1.0};
  Matrix x(2, 1);
  x(0, 0) = 2.0;
  x(1, 0) = 3.0;
  const Matrix y = dense_forward(layer, x);
  CHECK(y.rows == 1);
  CHECK(y.cols == 1);
  CHECK(y(0, 0) == 6.0);
}

TEST_CASE("dense_forward matches matmul plus broadcast oracle") {
  Rng rng(2);
  DenseLayer layer;
  layer.w = random_matrix(4, 6, rng);
  layer.b.resize(4);
  for (auto& v : layer.b) v = rng.uniform(-1.0, 1.0);
  const Matrix x = random_matrix(6, 7, rng);
  const Matrix y = dense_forward(layer, x);
  Matrix expected = matmul(layer.w, x);
  for (std::size_t i = 0; i < expected.rows; ++i)
    for (std::size_t j = 0; j < expected.cols; ++j) expected(i, j) += layer.b[i];
  CHECK(max_abs_diff(y, expected) < 1e-12);
}

TEST_CASE("leaky_relu branches") {
  Matrix x(1, 3);
  x(0, 0) = 2.0;
  x(0, 1) = -1.0;
  x(0, 2) = 0.0;
  const Matrix y = leaky_relu(x, 0.01);
  CHECK(y(0, 0) == 2.0);
  CHECK(y(0, 1) == -0.01);
  CHECK(y(0, 2) == 0.0);

  Rng rng(3);
  const Matrix r = random_matrix(4, 4, rng);
  const Matrix relu = leaky_relu(r, 0.0);
  for (std::size_t i = 0; i < r.size(); ++i)
    CHECK(relu.data[i] == (r.data[i] > 0.0 ? r.data[i] : 0.0));
}

TEST_CASE("dense_backward zero upstream gradient") {
  Rng rng(4);
  DenseLayer layer = init_dense(3, 2, rng);
  const Matrix x = random_matrix(3, 5, rng);
  DenseGrad grad = zero_grad_like(layer);
  const Matrix dx = dense_backward(layer, x, Matrix(2, 5, 0.0), grad);
  for (double v : grad.w.data) CHECK(v == 0.0);
  for (double v : grad.b) CHECK(v == 0.0);
  for (double v : dx.data) CHECK(v == 0.0);
}

TEST_CASE("dense_backward scalar chain rule") {
  DenseLayer layer;
  layer.w = Matrix(1, 1);
  layer.w(0, 0) = 2.0;
  layer.b = {0.0};
  Matrix x(1, 1);
  x(0, 0) = 3.0;
  Matrix grad_y(1, 1);
  grad_y(0, 0) = 1.0;
  DenseGrad grad = zero_grad_like(layer);
  const Matrix dx = dense_backward(layer, x, grad_y, grad);
  CHECK(grad.w(0, 0) == 3.0);
  CHECK(grad.b[0] == 1.0);
  CHECK(dx(0, 0) == 2.0);
}

TEST_CASE("dense_backward matches finite differences") {
  Rng rng(5);
  DenseLayer layer = init_dense(4, 3, rng);
  for (auto& v : layer.b) v = rng.uniform(-0.5, 0.5);
  const Matrix x = random_matrix(4, 6, rng);

  DenseGrad grad = zero_grad_like(layer);
  const Matrix y = dense_forward(layer, x);
  const Matrix dx = dense_backward(layer, x, y, grad);  // dL/dy = y for L = 0.5 y^2

  const double h = 1e-5;
  auto relative_error = [](double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
  };
  for (std::size_t i = 0; i < layer.w.size(); ++i) {
    DenseLayer probe = layer;
    probe.w.data[i] += h;
    const double up = half_square_sum(dense_forward(probe, x));
    probe.w.data[i] -= 2 * h;
    const double down = half_square_sum(dense_forward(probe, x));
    CHECK(relative_error(grad.w.data[i], (up - down) / (2 * h)) < 1e-6);
  }
  for (std::size_t i = 0; i < layer.b.size(); ++i) {
    DenseLayer probe = layer;
    probe.b[i] += h;
    const double up = half_square_sum(dense_forward(probe, x));
    probe.b[i] -= 2 * h;
    const double down = half_square_sum(dense_forward(probe, x));
    CHECK(relative_error(grad.b[i], (up - down) / (2 * h)) < 1e-6);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    Matrix probe = x;
    probe.data[i] += h;
    const double up = half_square_sum(dense_forward(layer, probe));
    probe.data[i] -= 2 * h;
    const double down = half_square_sum(dense_forward(layer, probe));
    CHECK(relative_error(dx.data[i], (up - down) / (2 * h)) < 1e-6);
  }
}

TEST_CASE("leaky_relu_backward matches finite differences away from the kink") {
  Rng rng(6);
  Matrix x(3, 4);
  for (auto& v : x.data) {
    v = rng.uniform(-1.0, 1.0);
    if (std::abs(v) < 0.01) v = 0.5;  // keep probes off the non-differentiable point
  }
  const double slope = 0.01;
  const Matrix y = leaky_relu(x, slope);
  const Matrix dx = leaky_relu_backward(x, y, slope);  // dL/dy = y
  const double h = 1e-5;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Matrix probe = x;
    probe.data[i] += h;
    const double up = half_square_sum(leaky_relu(probe, slope));
    probe.data[i] -= 2 * h;
    const double down = half_square_sum(leaky_relu(probe, slope));
    CHECK(std::abs(dx.data[i] - (up - down) / (2 * h)) < 1e-6);
  }
}

TEST_CASE("adam_step with zero gradient leaves params and advances t") {
  std::vector<double> param{1.0, -2.0};
  AdamState state;
  adam_step(param, {0.0, 0.0}, state, 0.001);
  CHECK(param[0] == 1.0);
  CHECK(param[1] == -2.0);
  CHECK(state.t == 1);
}

TEST_CASE("adam first step moves by about minus lr") {
  std::vector<double> param{0.0};
  AdamState state;
  adam_step(param, {1.0}, state, 0.001);
  // With g=1 the bias-corrected moments are both 1, so the update is
  // -lr / (1 + eps).
  CHECK(param[0] == doctest::Approx(-0.001).epsilon(1e-6));
}

TEST_CASE("adam matches a scalar step-by-step oracle") {
  std::vector<double> param{0.5};
  AdamState state;
  const double lr = 0.01;
  const std::vector<double> grads{0.3, 0.3, -0.2, 0.7};

  double p = 0.5;
  double m = 0.0;
  double v = 0.0;
  for (std::size_t step = 0; step < grads.size(); ++step) {
    adam_step(param, {grads[step]}, state, lr);
    const double t = static_cast<double>(step + 1);
    m = 0.9 * m + 0.1 * grads[step];
    v = 0.999 * v + 0.001 * grads[step] * grads[step];
    const double m_hat = m / (1.0 - std::pow(0.9, t));
    const double v_hat = v / (1.0 - std::pow(0.999, t));
    p -= lr * m_hat / (std::sqrt(v_hat) + 1e-8);
    CHECK(param[0] == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(state.t == 4);
}

TEST_CASE("adam rejects non-finite gradients") {
  std::vector<double> param{0.0};
  AdamState state;
  CHECK_THROWS_AS(adam_step(param, {std::nan("")}, state, 0.001), NumericError);
}

TEST_CASE("learning-rate schedule decays exponentially") {
  const LrSchedule sched{0.001, 0.95};
  CHECK(lr_at_epoch(sched, 0) == doctest::Approx(0.001));
  CHECK(lr_at_epoch(sched, 1) == doctest::Approx(0.00095));
  CHECK(lr_at_epoch(sched, 10) == doctest::Approx(0.001 * std::pow(0.95, 10)).epsilon(1e-12));
}

TEST_CASE("init_dense respects the fan-in bound") {
  Rng rng(8);
  DenseLayer one = init_dense(1, 32, rng);
  for (double v : one.w.data) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  for (double v : one.b) CHECK(v == 0.0);

  Rng a(9);
  Rng b(9);
  DenseLayer la = init_dense(7, 5, a);
  DenseLayer lb = init_dense(7, 5, b);
  CHECK(la.w.data == lb.w.data);

  Rng rng2(10);
  const std::size_t in_dim = 100;
  DenseLayer big = init_dense(in_dim, 100, rng2);  // 10^4 entries
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  double sum = 0.0;
  for (double v : big.w.data) {
    CHECK(std::abs(v) <= bound);
    sum += v;
  }
  const double n = static_cast<double>(big.w.size());
  const double sigma_mean = bound / std::sqrt(3.0 * n);
  CHECK(std::abs(sum / n) < 3.0 * sigma_mean);
}

TEST_CASE("clip_global_norm scales only above the threshold") {
  std::vector<double> g1{3.0, 0.0};
  std::vector<double> g2{0.0, 4.0};
  const double before = clip_global_norm({&g1, &g2}, 1.0);
  CHECK(before == doctest::Approx(5.0));
  double norm2 = 0.0;
  for (double v : g1) norm2 += v * v;
  for (double v : g2) norm2 += v * v;
  CHECK(std::sqrt(norm2) == doctest::Approx(1.0));
  CHECK(g1[0] == doctest::Approx(0.6));
  CHECK(g2[1] == doctest::Approx(0.8));

  std::vector<double> small{0.1, 0.1};
  const std::vector<double> copy = small;
  const double norm = clip_global_norm({&small}, 1.0);
  CHECK(norm == doctest::Approx(std::sqrt(0.02)));
  CHECK(small == copy);
}
