#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops of the tensor engine.
//
// Every kernel has a scalar reference implementation; vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64) are selected once at runtime. Products
// of two floats are exact in double precision, so the accumulate-into-double
// kernels (axpy) give bit-identical results across variants; reductions (dot)
// differ only in summation order.
//
// The PDPP_SIMD environment variable (scalar | avx2 | neon | auto) overrides
// the selection.
namespace pdpp::simd {

struct KernelSet {
  std::string_view name;
  /// sum_i x[i] * y[i], accumulated in double.
  double (*dot)(const float* x, const float* y, std::size_t n);
  /// acc[i] += alpha * x[i], accumulated in double.
  void (*axpy)(double* acc, double alpha, const float* x, std::size_t n);
  /// dst[i] += src[i]
  void (*add)(float* dst, const float* src, std::size_t n);
  /// dst[i] = max(src[i], 0)
  void (*relu)(float* dst, const float* src, std::size_t n);
};

const KernelSet& scalar_kernels();

/// Variants compiled into this binary and supported by the running CPU,
/// scalar first.
std::span<const KernelSet* const> available_kernels();

/// The kernel set used by the tensor engine.
const KernelSet& active_kernels();

/// Forces a kernel set by name; returns false if it is not available.
bool select_kernels(std::string_view name);

// Precision-generic entry points used by the tensor engine. The double
// overloads exist for the 64-bit gradient-check build and are scalar only.

inline double dot(const float* x, const float* y, std::size_t n) { return active_kernels().dot(x, y, n); }
inline void axpy(double* acc, double alpha, const float* x, std::size_t n) { active_kernels().axpy(acc, alpha, x, n); }
inline void add(float* dst, const float* src, std::size_t n) { active_kernels().add(dst, src, n); }
inline void relu(float* dst, const float* src, std::size_t n) { active_kernels().relu(dst, src, n); }

inline double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}
inline void axpy(double* acc, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += alpha * x[i];
}
inline void add(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}
inline void relu(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
}

}  // namespace pdpp::simd
