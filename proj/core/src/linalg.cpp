#include "xferlab/linalg.hpp"

#include <cmath>

#include "xferlab/errors.hpp"

namespace xferlab::linalg {

Mat gram_tt(const Mat& h) {
  Mat g(h.cols, h.cols);
  for (size_t r = 0; r < h.rows; ++r) {
    const double* hr = h.row(r);
    for (size_t i = 0; i < h.cols; ++i) {
      const double hi = hr[i];
      if (hi == 0.0) continue;
      double* gi = g.row(i);
      for (size_t j = i; j < h.cols; ++j) gi[j] += hi * hr[j];
    }
  }
  for (size_t i = 0; i < h.cols; ++i) {
    for (size_t j = 0; j < i; ++j) g.at(i, j) = g.at(j, i);
  }
  return g;
}

Mat gram(const Mat& h) {
  Mat g(h.rows, h.rows);
  for (size_t i = 0; i < h.rows; ++i) {
    for (size_t j = i; j < h.rows; ++j) {
      double s = 0.0;
      const double* hi = h.row(i);
      const double* hj = h.row(j);
      for (size_t c = 0; c < h.cols; ++c) s += hi[c] * hj[c];
      g.at(i, j) = s;
      g.at(j, i) = s;
    }
  }
  return g;
}

std::vector<double> matvec_t(const Mat& h, const std::vector<double>& v) {
  if (v.size() != h.rows) {
    throw Error(ErrorKind::InvalidArgument, "matvec_t: size mismatch");
  }
  std::vector<double> out(h.cols, 0.0);
  for (size_t r = 0; r < h.rows; ++r) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    const double* hr = h.row(r);
    for (size_t c = 0; c < h.cols; ++c) out[c] += vr * hr[c];
  }
  return out;
}

std::vector<double> matvec(const Mat& h, const std::vector<double>& v) {
  if (v.size() != h.cols) {
    throw Error(ErrorKind::InvalidArgument, "matvec: size mismatch");
  }
  std::vector<double> out(h.rows, 0.0);
  for (size_t r = 0; r < h.rows; ++r) {
    const double* hr = h.row(r);
    double s = 0.0;
    for (size_t c = 0; c < h.cols; ++c) s += hr[c] * v[c];
    out[r] = s;
  }
  return out;
}

void add_diagonal(Mat& a, double lambda) {
  for (size_t i = 0; i < a.rows; ++i) a.at(i, i) += lambda;
}

std::vector<double> cholesky_solve_spd(Mat a, std::vector<double> b) {
  if (a.rows != a.cols || b.size() != a.rows) {
    throw Error(ErrorKind::InvalidArgument, "cholesky_solve_spd: size mismatch");
  }
  const size_t n = a.rows;
  // lower-triangular factor written over a
  for (size_t j = 0; j < n; ++j) {
    double d = a.at(j, j);
    for (size_t k = 0; k < j; ++k) d -= a.at(j, k) * a.at(j, k);
    if (!(d > 1e-12)) {
      throw Error(ErrorKind::InvalidArgument,
                  "cholesky: pivot " + std::to_string(d) + " at index " +
                      std::to_string(j) + ", matrix not positive definite");
    }
    const double ljj = std::sqrt(d);
    a.at(j, j) = ljj;
    for (size_t i = j + 1; i < n; ++i) {
      double s = a.at(i, j);
      for (size_t k = 0; k < j; ++k) s -= a.at(i, k) * a.at(j, k);
      a.at(i, j) = s / ljj;
    }
  }
  // forward substitution: L y = b
  for (size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (size_t k = 0; k < i; ++k) s -= a.at(i, k) * b[k];
    b[i] = s / a.at(i, i);
  }
  // back substitution: L^T x = y
  for (size_t i = n; i-- > 0;) {
    double s = b[i];
    for (size_t k = i + 1; k < n; ++k) s -= a.at(k, i) * b[k];
    b[i] = s / a.at(i, i);
  }
  return b;
}

}  // namespace xferlab::linalg
