#include "kernels_internal.hpp"

namespace pdpp::simd::detail {

double dot_scalar(const float* x, const float* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(x[i]) * static_cast<double>(y[i]);
  return s;
}

void axpy_scalar(double* acc, double alpha, const float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += alpha * static_cast<double>(x[i]);
}

void add_scalar(float* dst, const float* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void relu_scalar(float* dst, const float* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > 0.0f ? src[i] : 0.0f;
}

}  // namespace pdpp::simd::detail
