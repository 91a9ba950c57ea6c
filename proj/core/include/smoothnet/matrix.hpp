#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

namespace smoothnet {

/// Dense row-major matrix of 64-bit floats. The workhorse container for
/// network weights, window batches and small alignment problems.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row_ptr(std::size_t r) { return data.data() + r * cols; }
  const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }

  std::size_t size() const { return rows * cols; }
  bool all_finite() const;

  static Matrix identity(std::size_t n);
};

/// C = a * b with 64-bit accumulation. Throws ShapeError on a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

/// C = a * b^T (used for weight gradients: grad_out * x^T).
Matrix matmul_abt(const Matrix& a, const Matrix& b);

/// C = a^T * b (used for input gradients: w^T * grad_out).
Matrix matmul_atb(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

double determinant(const Matrix& m);  // 2x2 or 3x3 only

/// Singular value decomposition of a 2x2 or 3x3 matrix via one-sided cyclic
/// Jacobi. Returns (U, s, Vt) with m = U * diag(s) * Vt, U and Vt orthonormal,
/// s non-negative in descending order. Throws NumericError on non-finite
/// input, ShapeError on unsupported sizes.
std::tuple<Matrix, std::vector<double>, Matrix> svd_small(const Matrix& m);

/// Minimize ||a*x - b||_2 by Householder QR. Requires a.rows >= a.cols and
/// full column rank; throws SingularError otherwise.
std::vector<double> solve_least_squares(const Matrix& a, const std::vector<double>& b);

}  // namespace smoothnet
