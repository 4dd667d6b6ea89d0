#pragma once

#include <cstddef>
#include <vector>

namespace xferlab::linalg {

/// Dense row-major matrix, just big enough for the regression problems
/// here (tens of rows, feature dims in the hundreds).
struct Mat {
  size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return a[r * cols + c]; }
  double at(size_t r, size_t c) const { return a[r * cols + c]; }
  const double* row(size_t r) const { return &a[r * cols]; }
  double* row(size_t r) { return &a[r * cols]; }
};

/// H^T H (cols x cols).
Mat gram_tt(const Mat& h);
/// H H^T (rows x rows).
Mat gram(const Mat& h);
/// H^T v.
std::vector<double> matvec_t(const Mat& h, const std::vector<double>& v);
/// H v.
std::vector<double> matvec(const Mat& h, const std::vector<double>& v);

void add_diagonal(Mat& a, double lambda);

/// Solves A x = b for symmetric positive-definite A via an in-place
/// Cholesky factorization. Pivots below 1e-12 fail the solve.
std::vector<double> cholesky_solve_spd(Mat a, std::vector<double> b);

}  // namespace xferlab::linalg
