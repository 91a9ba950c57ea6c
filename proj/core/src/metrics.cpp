#include "smoothnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "smoothnet/errors.hpp"

namespace smoothnet {

namespace {

struct JointGrouping {
  std::size_t joints;
  std::size_t dims;
};

JointGrouping grouping(const PoseSequence& seq) {
  if (seq.layout == Layout::kGeneric) return {seq.channels(), 1};
  return {seq.num_joints, seq.dims};
}

void check_compatible(const PoseSequence& pred, const PoseSequence& gt) {
  if (pred.length() != gt.length() || pred.channels() != gt.channels()) {
    throw ShapeError("metrics: pred and gt shapes differ");
  }
  if (pred.layout != gt.layout || pred.num_joints != gt.num_joints || pred.dims != gt.dims) {
    throw ShapeError("metrics: pred and gt layouts differ");
  }
}

double frame_joint_error(const double* p, const double* q, std::size_t joints,
                         std::size_t dims) {
  double acc = 0.0;
  for (std::size_t j = 0; j < joints; ++j) {
    double norm_sq = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = p[j * dims + d] - q[j * dims + d];
      norm_sq += diff * diff;
    }
    acc += std::sqrt(norm_sq);
  }
  return acc / static_cast<double>(joints);
}

}  // namespace

std::pair<double, std::vector<double>> mpjpe(const PoseSequence& pred, const PoseSequence& gt) {
  check_compatible(pred, gt);
  const auto [joints, dims] = grouping(pred);
  const std::size_t length = pred.length();
  std::vector<double> per_frame(length);
  double total = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    per_frame[t] = frame_joint_error(pred.frames.row_ptr(t), gt.frames.row_ptr(t), joints, dims);
    total += per_frame[t];
  }
  return {total / static_cast<double>(length), std::move(per_frame)};
}

namespace {

constexpr double kDegenerate = 1e-150;

// Core similarity fit for row-stacked points; dims 1..3.
Matrix align_points(const Matrix& pred, const Matrix& gt) {
  const std::size_t n = pred.rows, d = pred.cols;
  std::vector<double> mu_p(d, 0.0), mu_q(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      mu_p[k] += pred(i, k);
      mu_q[k] += gt(i, k);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    mu_p[k] /= static_cast<double>(n);
    mu_q[k] /= static_cast<double>(n);
  }

  Matrix pc(n, d), qc(n, d);
  double var_p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      pc(i, k) = pred(i, k) - mu_p[k];
      qc(i, k) = gt(i, k) - mu_q[k];
      var_p += pc(i, k) * pc(i, k);
    }
  }
  if (var_p <= kDegenerate) {
    throw AlignmentError("procrustes_align: degenerate frame (all joints coincident)");
  }

  Matrix rot;
  double trace_term = 0.0;
  if (d == 1) {
    rot = Matrix::identity(1);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += qc(i, 0) * pc(i, 0);
    trace_term = std::max(m, 0.0);
  } else {
    const Matrix cross = matmul_atb(qc, pc);  // sum of q~ p~^T
    auto [u, s, vt] = svd_small(cross);
    const double det_uv = determinant(matmul(u, vt));
    const double sign_fix = det_uv < 0.0 ? -1.0 : 1.0;
    Matrix corr = Matrix::identity(d);
    corr(d - 1, d - 1) = sign_fix;
    rot = matmul(matmul(u, corr), vt);
    for (std::size_t k = 0; k + 1 < d; ++k) trace_term += s[k];
    trace_term += sign_fix * s[d - 1];
    trace_term = std::max(trace_term, 0.0);
  }
  const double scale = trace_term / var_p;

  // t = mu_q - s R mu_p; aligned rows are s (R p)^T + t^T.
  std::vector<double> shift(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += rot(i, k) * mu_p[k];
    shift[i] = mu_q[i] - scale * acc;
  }
  Matrix aligned(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      double acc = 0.0;
      for (std::size_t m = 0; m < d; ++m) acc += rot(k, m) * pred(i, m);
      aligned(i, k) = scale * acc + shift[k];
    }
  }
  if (!aligned.all_finite()) throw AlignmentError("procrustes_align: non-finite alignment");
  return aligned;
}

}  // namespace

Matrix procrustes_align(const Matrix& pred_frame, const Matrix& gt_frame) {
  if (pred_frame.rows != gt_frame.rows || pred_frame.cols != gt_frame.cols) {
    throw ShapeError("procrustes_align: frame shapes differ");
  }
  if (pred_frame.cols != 2 && pred_frame.cols != 3) {
    throw ShapeError("procrustes_align: dims must be 2 or 3");
  }
  if (pred_frame.rows < pred_frame.cols) {
    throw ShapeError("procrustes_align: need at least dims joints");
  }
  return align_points(pred_frame, gt_frame);
}

double pa_mpjpe(const PoseSequence& pred, const PoseSequence& gt) {
  check_compatible(pred, gt);
  const auto [joints, dims] = grouping(pred);
  const std::size_t length = pred.length();
  double total = 0.0;
  std::size_t aligned_frames = 0, skipped = 0;
  Matrix pf(joints, dims), qf(joints, dims);
  for (std::size_t t = 0; t < length; ++t) {
    const double* prow = pred.frames.row_ptr(t);
    const double* qrow = gt.frames.row_ptr(t);
    std::copy(prow, prow + joints * dims, pf.data.begin());
    std::copy(qrow, qrow + joints * dims, qf.data.begin());
    try {
      const Matrix aligned = align_points(pf, qf);
      total += frame_joint_error(aligned.data.data(), qf.data.data(), joints, dims);
      ++aligned_frames;
    } catch (const AlignmentError&) {
      ++skipped;
    }
  }
  if (skipped > 0) {
    std::fprintf(stderr, "pa_mpjpe: skipped %zu degenerate frame(s) of %zu\n", skipped, length);
  }
  if (aligned_frames == 0) throw AlignmentError("pa_mpjpe: every frame is degenerate");
  return total / static_cast<double>(aligned_frames);
}

std::pair<double, std::vector<double>> accel_error(const PoseSequence& pred,
                                                   const PoseSequence& gt) {
  check_compatible(pred, gt);
  if (pred.length() < 3) throw ShapeError("accel_error: need at least 3 frames");
  const auto [joints, dims] = grouping(pred);
  const std::size_t length = pred.length(), channels = pred.channels();
  std::vector<double> pacc(channels), qacc(channels);
  std::vector<double> per_frame(length - 2);
  double total = 0.0;
  for (std::size_t t = 1; t + 1 < length; ++t) {
    const double* p0 = pred.frames.row_ptr(t - 1);
    const double* p1 = pred.frames.row_ptr(t);
    const double* p2 = pred.frames.row_ptr(t + 1);
    const double* q0 = gt.frames.row_ptr(t - 1);
    const double* q1 = gt.frames.row_ptr(t);
    const double* q2 = gt.frames.row_ptr(t + 1);
    for (std::size_t c = 0; c < channels; ++c) {
      pacc[c] = p2[c] - 2.0 * p1[c] + p0[c];
      qacc[c] = q2[c] - 2.0 * q1[c] + q0[c];
    }
    per_frame[t - 1] = frame_joint_error(pacc.data(), qacc.data(), joints, dims);
    total += per_frame[t - 1];
  }
  return {total / static_cast<double>(length - 2), std::move(per_frame)};
}

WorstResult worst_percent(const std::vector<double>& per_frame, double fraction,
                          const std::vector<double>* companion) {
  if (per_frame.empty()) throw ConfigError("worst_percent: empty series");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("worst_percent: fraction must be in (0, 1]");
  }
  if (companion && companion->size() != per_frame.size()) {
    throw ShapeError("worst_percent: companion length mismatch");
  }
  const auto len = per_frame.size();
  auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(len)));
  k = std::max<std::size_t>(1, std::min(k, len));

  std::vector<std::size_t> order(len);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (per_frame[a] != per_frame[b]) return per_frame[a] > per_frame[b];
    return a < b;
  });

  WorstResult result;
  double main_sum = 0.0;
  double comp_sum = 0.0;
  std::size_t comp_count = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t idx = order[i];
    main_sum += per_frame[idx];
    if (companion && !std::isnan((*companion)[idx])) {
      comp_sum += (*companion)[idx];
      ++comp_count;
    }
  }
  result.worst_main = main_sum / static_cast<double>(k);
  if (companion) {
    result.has_companion = true;
    result.worst_companion = comp_count > 0 ? comp_sum / static_cast<double>(comp_count) : 0.0;
  }
  return result;
}

MetricsReport evaluate(const PoseSequence& pred, const PoseSequence& gt, WorstAccelMode mode) {
  MetricsReport report;
  auto [m, per_frame_m] = mpjpe(pred, gt);
  report.mpjpe = m;
  report.pa_mpjpe = pa_mpjpe(pred, gt);
  auto [a, per_frame_a] = accel_error(pred, gt);
  report.accel = a;

  const std::size_t length = per_frame_m.size();
  std::vector<double> companion(length, std::nan(""));
  for (std::size_t t = 1; t + 1 < length; ++t) companion[t] = per_frame_a[t - 1];
  const WorstResult worst = worst_percent(per_frame_m, 0.01, &companion);
  report.mpjpe_worst1 = worst.worst_main;
  report.accel_worst1 = mode == WorstAccelMode::kCorresponding
                            ? worst.worst_companion
                            : worst_percent(per_frame_a, 0.01).worst_main;
  report.per_frame_mpjpe = std::move(per_frame_m);
  report.per_frame_accel = std::move(per_frame_a);
  return report;
}

}  // namespace smoothnet
