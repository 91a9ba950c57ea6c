#include <benchmark/benchmark.h>

#include "smoothnet/filters.hpp"
#include "smoothnet/metrics.hpp"
#include "smoothnet/model.hpp"
#include "smoothnet/parallel.hpp"
#include "smoothnet/synth.hpp"
#include "smoothnet/windowing.hpp"

namespace {

using namespace smoothnet;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  Rng rng(seed);
  for (auto& v : m.data) v = rng.uniform(-1.0, 1.0);
  return m;
}

PoseSequence bench_sequence(std::uint64_t seed) {
  MotionSpec spec;
  spec.length_l = 256;
  spec.channels = 51;
  spec.seed = seed;
  return synth_motion(spec);
}

SmoothNetConfig bench_config(Variant variant) {
  SmoothNetConfig cfg;
  cfg.variant = variant;
  cfg.window_t = 32;
  cfg.hidden = 64;
  cfg.blocks = 1;
  return cfg;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128);

void BM_ForwardBasic(benchmark::State& state) {
  const SmoothNetConfig cfg = bench_config(Variant::kBasic);
  Rng rng(3);
  const SmoothNetWeights weights = init_weights(cfg, rng);
  const Matrix window = random_matrix(cfg.window_t, 51 * 64, 4);
  for (auto _ : state) benchmark::DoNotOptimize(forward(cfg, weights, window));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64);
}
BENCHMARK(BM_ForwardBasic);

void BM_ForwardMotionAware(benchmark::State& state) {
  const SmoothNetConfig cfg = bench_config(Variant::kMotionAware);
  Rng rng(5);
  const SmoothNetWeights weights = init_weights(cfg, rng);
  const Matrix window = random_matrix(cfg.window_t, 51 * 64, 6);
  for (auto _ : state) benchmark::DoNotOptimize(forward(cfg, weights, window));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64);
}
BENCHMARK(BM_ForwardMotionAware);

void BM_LossAndGradients(benchmark::State& state) {
  const SmoothNetConfig cfg = bench_config(Variant::kMotionAware);
  Rng rng(7);
  const SmoothNetWeights weights = init_weights(cfg, rng);
  const Matrix noisy = random_matrix(cfg.window_t, 51 * 64, 8);
  const Matrix clean = random_matrix(cfg.window_t, 51 * 64, 9);
  SmoothNetGrads grads = zero_grads_like(weights);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        loss_and_gradients(cfg, weights, noisy, clean, LossMode::kPosePlusAccel, grads));
  }
}
BENCHMARK(BM_LossAndGradients);

void BM_SmoothSequence(benchmark::State& state) {
  const SmoothNetConfig cfg = bench_config(Variant::kMotionAware);
  Rng rng(11);
  const SmoothNetWeights weights = init_weights(cfg, rng);
  const PoseSequence seq = bench_sequence(12);
  const std::size_t windows = seq.length() - cfg.window_t + 1;
  for (auto _ : state) benchmark::DoNotOptimize(smooth_sequence(cfg, weights, seq, 1));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(windows));
}
BENCHMARK(BM_SmoothSequence);

void BM_GaussianFilter(benchmark::State& state) {
  const PoseSequence seq = bench_sequence(13);
  FilterSpec spec;
  spec.kind = FilterKind::kGaussian;
  spec.sigma = 4.0;
  spec.window = 129;
  for (auto _ : state) benchmark::DoNotOptimize(apply_filter(seq, spec));
}
BENCHMARK(BM_GaussianFilter);

void BM_SavgolFilter(benchmark::State& state) {
  const PoseSequence seq = bench_sequence(14);
  FilterSpec spec;
  spec.kind = FilterKind::kSavgol;
  spec.window = 31;
  spec.polyorder = 2;
  for (auto _ : state) benchmark::DoNotOptimize(apply_filter(seq, spec));
}
BENCHMARK(BM_SavgolFilter);

void BM_OneEuroFilter(benchmark::State& state) {
  const PoseSequence seq = bench_sequence(15);
  FilterSpec spec;
  spec.kind = FilterKind::kOneEuro;
  for (auto _ : state) benchmark::DoNotOptimize(apply_filter(seq, spec));
}
BENCHMARK(BM_OneEuroFilter);

void BM_Evaluate(benchmark::State& state) {
  PoseSequence pred = bench_sequence(16);
  const PoseSequence gt = bench_sequence(16);
  Rng rng(17);
  for (auto& v : pred.frames.data) v += 0.01 * rng.gaussian();
  pred.num_joints = 17;
  pred.dims = 3;
  pred.layout = Layout::kXyz;
  PoseSequence gt_xyz = gt;
  gt_xyz.num_joints = 17;
  gt_xyz.dims = 3;
  gt_xyz.layout = Layout::kXyz;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(pred, gt_xyz));
}
BENCHMARK(BM_Evaluate);

}  // namespace

BENCHMARK_MAIN();
