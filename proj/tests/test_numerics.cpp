#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "smoothnet/errors.hpp"
#include "smoothnet/matrix.hpp"
#include "smoothnet/parallel.hpp"
#include "smoothnet/rng.hpp"

using namespace smoothnet;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (auto& v : m.data) v = rng.uniform(-scale, scale);
  return m;
}

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows == b.rows);
  REQUIRE(a.cols == b.cols);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

Matrix reconstruct(const Matrix& u, const std::vector<double>& s, const Matrix& vt) {
  Matrix us = u;
  for (std::size_t i = 0; i < us.rows; ++i)
    for (std::size_t j = 0; j < us.cols; ++j) us(i, j) *= s[j];
  return matmul(us, vt);
}

double ortho_residual(const Matrix& q) {
  const Matrix gram = matmul_atb(q, q);
  return max_abs_diff(gram, Matrix::identity(q.cols));
}

}  // namespace

TEST_CASE("matmul identity passthrough") {
  Rng rng(11);
  const Matrix m = random_matrix(3, 4, rng);
  CHECK(max_abs_diff(matmul(Matrix::identity(3), m), m) == 0.0);
}

TEST_CASE("matmul hand example") {
  Matrix a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  Matrix b(2, 1);
  b(0, 0) = 0;
  b(1, 0) = 1;
  const Matrix c = matmul(a, b);
  CHECK(c(0, 0) == 2.0);
  CHECK(c(1, 0) == 4.0);
}

TEST_CASE("matmul matches triple-loop oracle") {
  Rng rng(12);
  const Matrix a = random_matrix(7, 5, rng);
  const Matrix b = random_matrix(5, 3, rng);
  CHECK(max_abs_diff(matmul(a, b), naive_matmul(a, b)) < 1e-12);
}

TEST_CASE("matmul shape mismatch throws") {
  CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
}

TEST_CASE("matmul is bit-identical across thread caps") {
  Rng rng(13);
  const Matrix a = random_matrix(160, 130, rng);
  const Matrix b = random_matrix(130, 90, rng);
  set_max_threads(1);
  const Matrix serial = matmul(a, b);
  set_max_threads(4);
  const Matrix parallel = matmul(a, b);
  set_max_threads(0);
  CHECK(max_abs_diff(serial, parallel) == 0.0);
}

TEST_CASE("matmul_abt and matmul_atb match transpose oracles") {
  Rng rng(14);
  const Matrix a = random_matrix(6, 4, rng);
  const Matrix b = random_matrix(5, 4, rng);
  CHECK(max_abs_diff(matmul_abt(a, b), naive_matmul(a, transpose(b))) < 1e-12);
  const Matrix c = random_matrix(6, 3, rng);
  CHECK(max_abs_diff(matmul_atb(a, c), naive_matmul(transpose(a), c)) < 1e-12);
}

TEST_CASE("determinant on known 2x2 and 3x3") {
  Matrix a(2, 2);
  a(0, 0) = 3;
  a(0, 1) = 1;
  a(1, 0) = 2;
  a(1, 1) = 5;
  CHECK(determinant(a) == doctest::Approx(13.0));
  Matrix b(3, 3);
  b(0, 0) = 2;
  b(1, 1) = 3;
  b(2, 2) = 4;
  b(0, 1) = 1;
  CHECK(determinant(b) == doctest::Approx(24.0));
}

TEST_CASE("svd of identity") {
  const auto [u, s, vt] = svd_small(Matrix::identity(3));
  for (double v : s) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ortho_residual(u) < 1e-12);
  CHECK(ortho_residual(vt) < 1e-12);
  CHECK(max_abs_diff(reconstruct(u, s, vt), Matrix::identity(3)) < 1e-12);
}

TEST_CASE("svd of diagonal matrix sorts singular values") {
  Matrix d(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 2;
  d(2, 2) = 1;
  const auto [u, s, vt] = svd_small(d);
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(2.0));
  CHECK(s[2] == doctest::Approx(1.0));
  CHECK(max_abs_diff(reconstruct(u, s, vt), d) < 1e-10);
}

TEST_CASE("svd of random matrices reconstructs with orthonormal factors") {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const Matrix m = random_matrix(n, n, rng, 2.0);
    const auto [u, s, vt] = svd_small(m);
    CHECK(max_abs_diff(reconstruct(u, s, vt), m) < 1e-10);
    CHECK(ortho_residual(u) < 1e-10);
    CHECK(ortho_residual(vt) < 1e-10);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) CHECK(s[i] >= s[i + 1]);
    for (double v : s) CHECK(v >= 0.0);
  }
}

TEST_CASE("svd of rank-deficient matrix keeps factors orthonormal") {
  Matrix m(3, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    m(0, j) = 1.0;
    m(1, j) = 2.0;
    m(2, j) = -1.0;
  }
  const auto [u, s, vt] = svd_small(m);
  CHECK(s[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ortho_residual(u) < 1e-10);
  CHECK(ortho_residual(vt) < 1e-10);
  CHECK(max_abs_diff(reconstruct(u, s, vt), m) < 1e-10);
}

TEST_CASE("svd rejects non-finite and oversized input") {
  Matrix bad(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(svd_small(bad), NumericError);
  CHECK_THROWS_AS(svd_small(Matrix(4, 4)), ShapeError);
}

TEST_CASE("least squares solves a square invertible system exactly") {
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 3;
  const std::vector<double> x = solve_least_squares(a, {5.0, 10.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("least squares recovers a noiseless line") {
  Matrix a(6, 2);
  std::vector<double> b(6);
  for (std::size_t t = 0; t < 6; ++t) {
    a(t, 0) = static_cast<double>(t);
    a(t, 1) = 1.0;
    b[t] = 2.0 * static_cast<double>(t) + 1.0;
  }
  const std::vector<double> x = solve_least_squares(a, b);
  CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("least squares matches the normal-equations oracle") {
  Rng rng(16);
  const Matrix a = random_matrix(10, 3, rng);
  std::vector<double> b(10);
  for (auto& v : b) v = rng.uniform(-1.0, 1.0);

  const Matrix ata = matmul_atb(a, a);
  std::vector<double> atb(3, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < 3; ++j) atb[j] += a(i, j) * b[i];
  // Cofactor inverse keeps the oracle independent of the QR path.
  Matrix inv(3, 3);
  const double det = determinant(ata);
  REQUIRE(std::abs(det) > 1e-12);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const std::size_t r0 = (i + 1) % 3, r1 = (i + 2) % 3;
      const std::size_t c0 = (j + 1) % 3, c1 = (j + 2) % 3;
      inv(j, i) = (ata(r0, c0) * ata(r1, c1) - ata(r0, c1) * ata(r1, c0)) / det;
    }
  std::vector<double> expected(3, 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) expected[i] += inv(i, j) * atb[j];

  const std::vector<double> x = solve_least_squares(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("least squares rejects rank-deficient systems") {
  Matrix a(4, 2);
  for (std::size_t t = 0; t < 4; ++t) {
    a(t, 0) = 1.0;
    a(t, 1) = 2.0;  // second column is a multiple of the first
  }
  CHECK_THROWS_AS(solve_least_squares(a, std::vector<double>(4, 1.0)), SingularError);
}
