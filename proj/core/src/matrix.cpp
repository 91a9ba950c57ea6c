#include "smoothnet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smoothnet/errors.hpp"
#include "smoothnet/parallel.hpp"

namespace smoothnet {

namespace {

// Column block sized so a block of b stays cache-resident across the i loop.
constexpr std::size_t kColBlock = 512;

// Row grain for threading; whole output rows per chunk keeps results
// independent of the thread count.
constexpr std::size_t kRowGrain = 16;
constexpr std::size_t kParallelFlops = 1u << 22;

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

}  // namespace

bool Matrix::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul: " + shape_str(a) + " incompatible with " + shape_str(b));
  }
  Matrix c(a.rows, b.cols);
  const std::size_t n = b.cols, k_dim = a.cols;
  auto row_range = [&](std::size_t i0, std::size_t i1) {
    for (std::size_t j0 = 0; j0 < n; j0 += kColBlock) {
      const std::size_t j1 = std::min(j0 + kColBlock, n);
      for (std::size_t i = i0; i < i1; ++i) {
        double* ci = c.row_ptr(i);
        const double* ai = a.row_ptr(i);
        for (std::size_t k = 0; k < k_dim; ++k) {
          const double aik = ai[k];
          const double* bk = b.row_ptr(k);
          for (std::size_t j = j0; j < j1; ++j) ci[j] += aik * bk[j];
        }
      }
    }
  };
  if (2 * a.rows * n * k_dim >= kParallelFlops) {
    detail::parallel_chunks(a.rows, kRowGrain, [&](std::size_t b0, std::size_t e0) {
      row_range(b0, e0);
    });
  } else {
    row_range(0, a.rows);
  }
  return c;
}

Matrix matmul_abt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) {
    throw ShapeError("matmul_abt: " + shape_str(a) + " incompatible with " + shape_str(b) + "^T");
  }
  Matrix c(a.rows, b.rows);
  auto row_range = [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      const double* ai = a.row_ptr(i);
      double* ci = c.row_ptr(i);
      for (std::size_t j = 0; j < b.rows; ++j) {
        const double* bj = b.row_ptr(j);
        double acc = 0.0;
        for (std::size_t k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
        ci[j] = acc;
      }
    }
  };
  if (2 * a.rows * b.rows * a.cols >= kParallelFlops) {
    detail::parallel_chunks(a.rows, kRowGrain, [&](std::size_t b0, std::size_t e0) {
      row_range(b0, e0);
    });
  } else {
    row_range(0, a.rows);
  }
  return c;
}

Matrix matmul_atb(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) {
    throw ShapeError("matmul_atb: " + shape_str(a) + "^T incompatible with " + shape_str(b));
  }
  Matrix c(a.cols, b.cols);
  const std::size_t n = b.cols;
  auto row_range = [&](std::size_t i0, std::size_t i1) {
    for (std::size_t j0 = 0; j0 < n; j0 += kColBlock) {
      const std::size_t j1 = std::min(j0 + kColBlock, n);
      for (std::size_t i = i0; i < i1; ++i) {
        double* ci = c.row_ptr(i);
        for (std::size_t k = 0; k < a.rows; ++k) {
          const double aki = a(k, i);
          const double* bk = b.row_ptr(k);
          for (std::size_t j = j0; j < j1; ++j) ci[j] += aki * bk[j];
        }
      }
    }
  };
  if (2 * a.cols * n * a.rows >= kParallelFlops) {
    detail::parallel_chunks(a.cols, kRowGrain, [&](std::size_t b0, std::size_t e0) {
      row_range(b0, e0);
    });
  } else {
    row_range(0, a.cols);
  }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

double determinant(const Matrix& m) {
  if (m.rows != m.cols || (m.rows != 2 && m.rows != 3)) {
    throw ShapeError("determinant: expected 2x2 or 3x3, got " + shape_str(m));
  }
  if (m.rows == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

namespace {

double col_dot(const Matrix& w, std::size_t p, std::size_t q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.rows; ++i) acc += w(i, p) * w(i, q);
  return acc;
}

void rotate_cols(Matrix& m, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double mp = m(i, p), mq = m(i, q);
    m(i, p) = c * mp - s * mq;
    m(i, q) = s * mp + c * mq;
  }
}

// Orthonormal completion of the trailing zero-singular-value columns of u.
void complete_basis(Matrix& u, std::size_t rank) {
  const std::size_t n = u.rows;
  if (rank == 0) {
    u = Matrix::identity(n);
    return;
  }
  for (std::size_t j = rank; j < n; ++j) {
    // Start from the axis vector least represented by the existing columns.
    std::vector<double> v(n, 0.0);
    std::size_t best_axis = 0;
    double best_resid = -1.0;
    for (std::size_t axis = 0; axis < n; ++axis) {
      double proj_sq = 0.0;
      for (std::size_t k = 0; k < j; ++k) {
        double d = u(axis, k);
        proj_sq += d * d;
      }
      const double resid = 1.0 - proj_sq;
      if (resid > best_resid) {
        best_resid = resid;
        best_axis = axis;
      }
    }
    v[best_axis] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {  // twice for numerical orthogonality
      for (std::size_t k = 0; k < j; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += v[i] * u(i, k);
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * u(i, k);
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) u(i, j) = v[i] / norm;
  }
}

}  // namespace

std::tuple<Matrix, std::vector<double>, Matrix> svd_small(const Matrix& m) {
  if (m.rows != m.cols || (m.rows != 2 && m.rows != 3)) {
    throw ShapeError("svd_small: expected 2x2 or 3x3, got " + shape_str(m));
  }
  if (!m.all_finite()) throw NumericError("svd_small: non-finite input");

  const std::size_t n = m.rows;
  Matrix w = m;
  Matrix v = Matrix::identity(n);

  constexpr double kOffTol = 1e-15;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double app = col_dot(w, p, p);
        const double aqq = col_dot(w, q, q);
        const double apq = col_dot(w, p, q);
        if (std::abs(apq) <= kOffTol * std::sqrt(app * aqq)) continue;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate_cols(w, p, q, c, s);
        rotate_cols(v, p, q, c, s);
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double norm_sq = col_dot(w, j, j);
    sigma[j] = std::sqrt(norm_sq);
  }

  // Sort descending, permuting columns of w and v alike.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });
  Matrix u(n, n);
  Matrix v_sorted(n, n);
  std::vector<double> s_sorted(n);
  for (std::size_t j = 0; j < n; ++j) {
    s_sorted[j] = sigma[order[j]];
    for (std::size_t i = 0; i < n; ++i) {
      u(i, j) = w(i, order[j]);
      v_sorted(i, j) = v(i, order[j]);
    }
  }

  const double s_max = s_sorted[0];
  std::size_t rank = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (s_max > 0.0 && s_sorted[j] > 1e-13 * s_max) {
      for (std::size_t i = 0; i < n; ++i) u(i, j) /= s_sorted[j];
      ++rank;
    } else {
      s_sorted[j] = 0.0;
    }
  }
  complete_basis(u, rank);

  return {u, s_sorted, transpose(v_sorted)};
}

std::vector<double> solve_least_squares(const Matrix& a, const std::vector<double>& b) {
  if (a.rows < a.cols || a.cols == 0) {
    throw ShapeError("solve_least_squares: need rows >= cols >= 1, got " + shape_str(a));
  }
  if (b.size() != a.rows) {
    throw ShapeError("solve_least_squares: rhs length " + std::to_string(b.size()) +
                     " != rows " + std::to_string(a.rows));
  }
  const std::size_t m = a.rows, n = a.cols;
  Matrix r = a;
  std::vector<double> qtb = b;

  double frob = 0.0;
  for (double x : r.data) frob += x * x;
  frob = std::sqrt(frob);
  const double tol = 1e-12 * (frob > 0 ? frob : 1.0);

  std::vector<double> hv(m);
  for (std::size_t k = 0; k < n; ++k) {
    double norm_sq = 0.0;
    for (std::size_t i = k; i < m; ++i) norm_sq += r(i, k) * r(i, k);
    const double normx = std::sqrt(norm_sq);
    if (normx <= tol) {
      throw SingularError("solve_least_squares: rank-deficient at column " + std::to_string(k));
    }
    const double sign = r(k, k) >= 0 ? 1.0 : -1.0;
    const double u1 = r(k, k) + sign * normx;
    const double hv_tau = sign * u1 / normx;
    hv[k] = 1.0;
    for (std::size_t i = k + 1; i < m; ++i) hv[i] = r(i, k) / u1;

    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += hv[i] * r(i, j);
      dot *= hv_tau;
      for (std::size_t i = k; i < m; ++i) r(i, j) -= dot * hv[i];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < m; ++i) dot += hv[i] * qtb[i];
    dot *= hv_tau;
    for (std::size_t i = k; i < m; ++i) qtb[i] -= dot * hv[i];
  }

  std::vector<double> x(n);
  for (std::size_t kk = n; kk-- > 0;) {
    double acc = qtb[kk];
    for (std::size_t j = kk + 1; j < n; ++j) acc -= r(kk, j) * x[j];
    if (std::abs(r(kk, kk)) <= tol) {
      throw SingularError("solve_least_squares: rank-deficient at column " + std::to_string(kk));
    }
    x[kk] = acc / r(kk, kk);
  }
  return x;
}

}  // namespace smoothnet
