#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace xferlab {

/// Dense row-major multi-dimensional array of doubles.
struct Tensor {
  std::vector<size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<size_t> s);
  Tensor(std::vector<size_t> s, std::vector<double> d);

  size_t numel() const { return data.size(); }
  size_t rank() const { return shape.size(); }

  double& operator[](size_t i) { return data[i]; }
  double operator[](size_t i) const { return data[i]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool operator==(const Tensor& o) const {
    return shape == o.shape && data == o.data;
  }

  /// Copy with shape collapsed to a single axis.
  Tensor flattened() const { return Tensor({numel()}, data); }
};

size_t shape_numel(const std::vector<size_t>& shape);
std::string shape_str(const std::vector<size_t>& shape);

/// Throws ErrorKind::InvalidArgument if any entry is NaN or infinite.
void check_finite(const Tensor& t, const char* what);
bool all_finite(const Tensor& t);

double dot(const Tensor& a, const Tensor& b);
double l1_norm(const Tensor& t);
double l2_norm(const Tensor& t);
double linf_norm(const Tensor& t);

/// Elementwise sign with sgn(0) = 0.
inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace xferlab
