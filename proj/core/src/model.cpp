#include "smoothnet/model.hpp"

#include <cmath>

#include "smoothnet/errors.hpp"

namespace smoothnet {

std::string variant_name(Variant v) {
  return v == Variant::kBasic ? "basic" : "motion_aware";
}

Variant variant_from_name(const std::string& name) {
  if (name == "basic") return Variant::kBasic;
  if (name == "motion_aware") return Variant::kMotionAware;
  throw ConfigError("unknown variant '" + name + "' (expected basic|motion_aware)");
}

SmoothNetConfig default_config(Variant v) {
  SmoothNetConfig cfg;
  cfg.variant = v;
  cfg.window_t = 32;
  cfg.hidden = 256;
  cfg.blocks = v == Variant::kBasic ? 3 : 1;
  cfg.leaky_slope = 0.01;
  return cfg;
}

void validate_config(const SmoothNetConfig& cfg) {
  const std::size_t min_t = cfg.variant == Variant::kMotionAware ? 3 : 2;
  if (cfg.window_t < min_t) {
    throw ConfigError("window_t must be >= " + std::to_string(min_t) + " for variant " +
                      variant_name(cfg.variant));
  }
  if (cfg.hidden < 1) throw ConfigError("hidden must be >= 1");
  if (cfg.blocks < 1) throw ConfigError("blocks must be >= 1");
  if (!(cfg.leaky_slope >= 0.0 && cfg.leaky_slope < 1.0)) {
    throw ConfigError("leaky_slope must be in [0, 1)");
  }
}

namespace {

Branch init_branch(std::size_t in_dim, const SmoothNetConfig& cfg, Rng& rng) {
  Branch br;
  br.encoder = init_dense(in_dim, cfg.hidden, rng);
  br.blocks.resize(cfg.blocks);
  for (auto& blk : br.blocks) {
    blk.fc1 = init_dense(cfg.hidden, cfg.hidden, rng);
    blk.fc2 = init_dense(cfg.hidden, cfg.hidden, rng);
  }
  br.decoder = init_dense(cfg.hidden, cfg.window_t, rng);
  return br;
}

}  // namespace

SmoothNetWeights init_weights(const SmoothNetConfig& cfg, Rng& rng) {
  validate_config(cfg);
  SmoothNetWeights w;
  if (cfg.variant == Variant::kBasic) {
    w.branches.push_back(init_branch(cfg.window_t, cfg, rng));
  } else {
    w.branches.push_back(init_branch(cfg.window_t, cfg, rng));
    w.branches.push_back(init_branch(cfg.window_t - 1, cfg, rng));
    w.branches.push_back(init_branch(cfg.window_t - 2, cfg, rng));
    w.fusion = init_dense(3 * cfg.window_t, cfg.window_t, rng);
  }
  return w;
}

std::size_t param_count(const SmoothNetConfig& cfg) {
  validate_config(cfg);
  const std::size_t t = cfg.window_t, h = cfg.hidden, n = cfg.blocks;
  auto branch = [&](std::size_t in_dim) {
    return (in_dim * h + h) + n * 2 * (h * h + h) + (h * t + t);
  };
  if (cfg.variant == Variant::kBasic) return branch(t);
  return branch(t) + branch(t - 1) + branch(t - 2) + (3 * t * t + t);
}

namespace {

template <typename Weights, typename Layer>
std::vector<std::pair<std::string, Layer*>> collect_layers(Weights& w) {
  std::vector<std::pair<std::string, Layer*>> out;
  const bool motion = w.branches.size() == 3;
  static const char* kPrefixes[3] = {"pos.", "vel.", "acc."};
  for (std::size_t bi = 0; bi < w.branches.size(); ++bi) {
    const std::string pre = motion ? kPrefixes[bi] : "";
    out.emplace_back(pre + "encoder", &w.branches[bi].encoder);
    for (std::size_t k = 0; k < w.branches[bi].blocks.size(); ++k) {
      const std::string blk = pre + "block" + std::to_string(k);
      out.emplace_back(blk + ".fc1", &w.branches[bi].blocks[k].fc1);
      out.emplace_back(blk + ".fc2", &w.branches[bi].blocks[k].fc2);
    }
    out.emplace_back(pre + "decoder", &w.branches[bi].decoder);
  }
  if (motion) out.emplace_back("fusion", &w.fusion);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, DenseLayer*>> layer_entries(SmoothNetWeights& w) {
  return collect_layers<SmoothNetWeights, DenseLayer>(w);
}

std::vector<std::pair<std::string, const DenseLayer*>> layer_entries(const SmoothNetWeights& w) {
  return collect_layers<const SmoothNetWeights, const DenseLayer>(w);
}

Matrix diff_velocity(const Matrix& y) {
  if (y.rows < 2) throw ShapeError("diff_velocity: need at least 2 rows");
  Matrix v(y.rows - 1, y.cols);
  for (std::size_t t = 0; t + 1 < y.rows; ++t) {
    const double* y0 = y.row_ptr(t);
    const double* y1 = y.row_ptr(t + 1);
    double* vt = v.row_ptr(t);
    for (std::size_t j = 0; j < y.cols; ++j) vt[j] = y1[j] - y0[j];
  }
  return v;
}

Matrix diff_acceleration(const Matrix& v) {
  if (v.rows < 2) throw ShapeError("diff_acceleration: need at least 2 velocity rows");
  return diff_velocity(v);
}

namespace {

struct BlockTrace {
  Matrix u;   // fc1 pre-activation
  Matrix su;  // sigma(u)
};

struct BranchTrace {
  Matrix x;
  Matrix enc_pre;
  std::vector<Matrix> h;  // h[0] after encoder sigma, h[k+1] after block k
  std::vector<BlockTrace> blk;
};

void add_into(Matrix& a, const Matrix& b) {
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

Matrix branch_forward(const Branch& br, const Matrix& x, double slope, BranchTrace* tr) {
  Matrix enc_pre = dense_forward(br.encoder, x);
  Matrix h = leaky_relu(enc_pre, slope);
  if (tr) {
    tr->x = x;
    tr->enc_pre = enc_pre;
    tr->h.push_back(h);
  }
  for (const auto& blk : br.blocks) {
    Matrix u = dense_forward(blk.fc1, h);
    Matrix su = leaky_relu(u, slope);
    Matrix d = dense_forward(blk.fc2, su);
    add_into(d, h);
    h = std::move(d);
    if (tr) {
      tr->blk.push_back({std::move(u), std::move(su)});
      tr->h.push_back(h);
    }
  }
  return dense_forward(br.decoder, h);
}

Matrix branch_backward(const Branch& br, const BranchTrace& tr, const Matrix& grad_out,
                       double slope, BranchGrad& bg) {
  Matrix g_h = dense_backward(br.decoder, tr.h.back(), grad_out, bg.decoder);
  for (std::size_t k = br.blocks.size(); k-- > 0;) {
    Matrix grad_su = dense_backward(br.blocks[k].fc2, tr.blk[k].su, g_h, bg.blocks[k].fc2);
    Matrix grad_u = leaky_relu_backward(tr.blk[k].u, grad_su, slope);
    Matrix g_through = dense_backward(br.blocks[k].fc1, tr.h[k], grad_u, bg.blocks[k].fc1);
    add_into(g_h, g_through);  // residual skip
  }
  Matrix grad_enc_pre = leaky_relu_backward(tr.enc_pre, g_h, slope);
  return dense_backward(br.encoder, tr.x, grad_enc_pre, bg.encoder);
}

Matrix vstack3(const Matrix& a, const Matrix& b, const Matrix& c) {
  Matrix z(a.rows + b.rows + c.rows, a.cols);
  std::size_t r = 0;
  for (const Matrix* m : {&a, &b, &c}) {
    for (std::size_t i = 0; i < m->rows; ++i, ++r) {
      const double* src = m->row_ptr(i);
      double* dst = z.row_ptr(r);
      for (std::size_t j = 0; j < z.cols; ++j) dst[j] = src[j];
    }
  }
  return z;
}

Matrix slice_rows(const Matrix& m, std::size_t r0, std::size_t r1) {
  Matrix out(r1 - r0, m.cols);
  for (std::size_t i = r0; i < r1; ++i) {
    const double* src = m.row_ptr(i);
    double* dst = out.row_ptr(i - r0);
    for (std::size_t j = 0; j < m.cols; ++j) dst[j] = src[j];
  }
  return out;
}

struct MotionTrace {
  BranchTrace pos, vel, acc;
  Matrix z;  // 3T x cols concatenation fed to fusion
};

Matrix motion_forward(const SmoothNetConfig& cfg, const SmoothNetWeights& w, const Matrix& batch,
                      MotionTrace* tr) {
  Matrix v = diff_velocity(batch);
  Matrix a = diff_acceleration(v);
  Matrix ep = branch_forward(w.branches[0], batch, cfg.leaky_slope, tr ? &tr->pos : nullptr);
  Matrix ev = branch_forward(w.branches[1], v, cfg.leaky_slope, tr ? &tr->vel : nullptr);
  Matrix ea = branch_forward(w.branches[2], a, cfg.leaky_slope, tr ? &tr->acc : nullptr);
  Matrix z = vstack3(ep, ev, ea);
  Matrix out = dense_forward(w.fusion, z);
  if (tr) tr->z = std::move(z);
  return out;
}

void check_batch(const SmoothNetConfig& cfg, const SmoothNetWeights& w, const Matrix& batch,
                 Variant expect) {
  if (cfg.variant != expect) throw ConfigError("forward: wrong variant for this entry point");
  const std::size_t want = expect == Variant::kBasic ? 1 : 3;
  if (w.branches.size() != want) throw ShapeError("forward: weights do not match variant");
  if (batch.rows != cfg.window_t) {
    throw ShapeError("forward: batch has " + std::to_string(batch.rows) + " rows, expected " +
                     std::to_string(cfg.window_t));
  }
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Adjoint of the first-difference map v[t] = y[t+1] - y[t].
Matrix first_diff_transpose(const Matrix& gv) {
  Matrix gy(gv.rows + 1, gv.cols);
  for (std::size_t t = 0; t < gv.rows; ++t) {
    const double* g = gv.row_ptr(t);
    double* lo = gy.row_ptr(t);
    double* hi = gy.row_ptr(t + 1);
    for (std::size_t j = 0; j < gv.cols; ++j) {
      lo[j] -= g[j];
      hi[j] += g[j];
    }
  }
  return gy;
}

}  // namespace

Matrix forward_basic(const SmoothNetConfig& cfg, const SmoothNetWeights& w,
                     const WindowBatch& batch) {
  validate_config(cfg);
  check_batch(cfg, w, batch, Variant::kBasic);
  return branch_forward(w.branches[0], batch, cfg.leaky_slope, nullptr);
}

Matrix forward_motion_aware(const SmoothNetConfig& cfg, const SmoothNetWeights& w,
                            const WindowBatch& batch) {
  validate_config(cfg);
  check_batch(cfg, w, batch, Variant::kMotionAware);
  return motion_forward(cfg, w, batch, nullptr);
}

Matrix forward(const SmoothNetConfig& cfg, const SmoothNetWeights& w, const WindowBatch& batch) {
  return cfg.variant == Variant::kBasic ? forward_basic(cfg, w, batch)
                                        : forward_motion_aware(cfg, w, batch);
}

double loss_pose(const Matrix& g_hat, const Matrix& y) {
  if (g_hat.rows != y.rows || g_hat.cols != y.cols) throw ShapeError("loss_pose: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < g_hat.data.size(); ++i) acc += std::abs(g_hat.data[i] - y.data[i]);
  return acc / static_cast<double>(g_hat.data.size());
}

double loss_accel(const Matrix& g_hat, const Matrix& a_gt) {
  if (g_hat.rows < 3) throw ShapeError("loss_accel: need at least 3 frames");
  if (a_gt.rows != g_hat.rows - 2 || a_gt.cols != g_hat.cols) {
    throw ShapeError("loss_accel: acceleration target shape mismatch");
  }
  Matrix gpp = diff_acceleration(diff_velocity(g_hat));
  double acc = 0.0;
  for (std::size_t i = 0; i < gpp.data.size(); ++i) acc += std::abs(gpp.data[i] - a_gt.data[i]);
  return acc / static_cast<double>(gpp.data.size());
}

double loss_total(const Matrix& g_hat, const Matrix& y) {
  return loss_pose(g_hat, y) + loss_accel(g_hat, diff_acceleration(diff_velocity(y)));
}

std::string loss_mode_name(LossMode mode) {
  switch (mode) {
    case LossMode::kPoseOnly: return "pose_only";
    case LossMode::kAccelOnly: return "accel_only";
    default: return "pose_plus_accel";
  }
}

LossMode loss_mode_from_name(const std::string& name) {
  if (name == "pose_only") return LossMode::kPoseOnly;
  if (name == "accel_only") return LossMode::kAccelOnly;
  if (name == "pose_plus_accel") return LossMode::kPosePlusAccel;
  throw ConfigError("unknown loss mode '" + name + "'");
}

SmoothNetGrads zero_grads_like(const SmoothNetWeights& w) {
  SmoothNetGrads g;
  g.branches.resize(w.branches.size());
  for (std::size_t bi = 0; bi < w.branches.size(); ++bi) {
    g.branches[bi].encoder = zero_grad_like(w.branches[bi].encoder);
    g.branches[bi].blocks.resize(w.branches[bi].blocks.size());
    for (std::size_t k = 0; k < w.branches[bi].blocks.size(); ++k) {
      g.branches[bi].blocks[k].fc1 = zero_grad_like(w.branches[bi].blocks[k].fc1);
      g.branches[bi].blocks[k].fc2 = zero_grad_like(w.branches[bi].blocks[k].fc2);
    }
    g.branches[bi].decoder = zero_grad_like(w.branches[bi].decoder);
  }
  if (w.branches.size() == 3) g.fusion = zero_grad_like(w.fusion);
  return g;
}

std::vector<DenseGrad*> grad_entries(SmoothNetGrads& g) {
  std::vector<DenseGrad*> out;
  for (auto& br : g.branches) {
    out.push_back(&br.encoder);
    for (auto& blk : br.blocks) {
      out.push_back(&blk.fc1);
      out.push_back(&blk.fc2);
    }
    out.push_back(&br.decoder);
  }
  if (g.branches.size() == 3) out.push_back(&g.fusion);
  return out;
}

LossValue loss_and_gradients(const SmoothNetConfig& cfg, const SmoothNetWeights& w,
                             const WindowBatch& noisy, const WindowBatch& clean, LossMode mode,
                             SmoothNetGrads& grads) {
  validate_config(cfg);
  if (noisy.rows != clean.rows || noisy.cols != clean.cols) {
    throw ShapeError("loss_and_gradients: noisy/clean shape mismatch");
  }
  if (mode != LossMode::kPoseOnly && noisy.rows < 3) {
    throw ShapeError("loss_and_gradients: acceleration loss needs at least 3 frames");
  }

  const bool basic = cfg.variant == Variant::kBasic;
  BranchTrace basic_tr;
  MotionTrace motion_tr;
  Matrix g_hat;
  if (basic) {
    check_batch(cfg, w, noisy, Variant::kBasic);
    g_hat = branch_forward(w.branches[0], noisy, cfg.leaky_slope, &basic_tr);
  } else {
    check_batch(cfg, w, noisy, Variant::kMotionAware);
    g_hat = motion_forward(cfg, w, noisy, &motion_tr);
  }

  const double n_pose = static_cast<double>(g_hat.data.size());
  LossValue loss;
  Matrix grad_g(g_hat.rows, g_hat.cols);

  double pose_sum = 0.0;
  for (std::size_t i = 0; i < g_hat.data.size(); ++i) {
    const double d = g_hat.data[i] - clean.data[i];
    pose_sum += std::abs(d);
    if (mode != LossMode::kAccelOnly) grad_g.data[i] = sign(d) / n_pose;
  }
  loss.pose = pose_sum / n_pose;

  if (noisy.rows >= 3) {
    Matrix a_gt = diff_acceleration(diff_velocity(clean));
    Matrix g_pp = diff_acceleration(diff_velocity(g_hat));
    const double n_acc = static_cast<double>(g_pp.data.size());
    Matrix s(g_pp.rows, g_pp.cols);
    double acc_sum = 0.0;
    for (std::size_t i = 0; i < g_pp.data.size(); ++i) {
      const double d = g_pp.data[i] - a_gt.data[i];
      acc_sum += std::abs(d);
      s.data[i] = sign(d) / n_acc;
    }
    loss.accel = acc_sum / n_acc;
    if (mode != LossMode::kPoseOnly) {
      add_into(grad_g, first_diff_transpose(first_diff_transpose(s)));
    }
  }

  switch (mode) {
    case LossMode::kPoseOnly: loss.total = loss.pose; break;
    case LossMode::kAccelOnly: loss.total = loss.accel; break;
    default: loss.total = loss.pose + loss.accel;
  }

  if (basic) {
    branch_backward(w.branches[0], basic_tr, grad_g, cfg.leaky_slope, grads.branches[0]);
  } else {
    Matrix grad_z = dense_backward(w.fusion, motion_tr.z, grad_g, grads.fusion);
    const std::size_t t = cfg.window_t;
    Matrix gp = slice_rows(grad_z, 0, t);
    Matrix gv = slice_rows(grad_z, t, 2 * t);
    Matrix ga = slice_rows(grad_z, 2 * t, 3 * t);
    branch_backward(w.branches[0], motion_tr.pos, gp, cfg.leaky_slope, grads.branches[0]);
    branch_backward(w.branches[1], motion_tr.vel, gv, cfg.leaky_slope, grads.branches[1]);
    branch_backward(w.branches[2], motion_tr.acc, ga, cfg.leaky_slope, grads.branches[2]);
  }
  return loss;
}

}  // namespace smoothnet
