#include "xferlab/tensor.hpp"

#include <cmath>
#include <sstream>

#include "xferlab/errors.hpp"

namespace xferlab {

size_t shape_numel(const std::vector<size_t>& shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const std::vector<size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(std::vector<size_t> s)
    : shape(std::move(s)), data(shape_numel(shape), 0.0) {
  for (size_t d : shape) {
    if (d == 0) {
      throw Error(ErrorKind::InvalidArgument, "tensor dimension must be positive");
    }
  }
}

Tensor::Tensor(std::vector<size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (shape_numel(shape) != data.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "tensor data length does not match shape " + shape_str(shape));
  }
}

bool all_finite(const Tensor& t) {
  for (double v : t.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void check_finite(const Tensor& t, const char* what) {
  if (!all_finite(t)) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": non-finite value in tensor");
  }
}

double dot(const Tensor& a, const Tensor& b) {
  if (a.numel() != b.numel()) {
    throw Error(ErrorKind::InvalidArgument, "dot: size mismatch");
  }
  double s = 0.0;
  for (size_t i = 0; i < a.numel(); ++i) s += a.data[i] * b.data[i];
  return s;
}

double l1_norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data) s += std::fabs(v);
  return s;
}

double l2_norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data) s += v * v;
  return std::sqrt(s);
}

double linf_norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data) s = std::max(s, std::fabs(v));
  return s;
}

}  // namespace xferlab
