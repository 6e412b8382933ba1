#include "kernels_internal.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#define PDPP_HAVE_NEON_KERNELS 1
#include <arm_neon.h>
#endif

namespace pdpp::simd::detail {

#if defined(PDPP_HAVE_NEON_KERNELS)

namespace {

double dot_neon(const float* x, const float* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t vx = vld1q_f32(x + i);
    float32x4_t vy = vld1q_f32(y + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(vx)), vcvt_f64_f32(vget_low_f32(vy)));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(vx), vcvt_high_f64_f32(vy));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += static_cast<double>(x[i]) * static_cast<double>(y[i]);
  return s;
}

void axpy_neon(double* acc, double alpha, const float* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t vx = vld1q_f32(x + i);
    float64x2_t a0 = vld1q_f64(acc + i);
    float64x2_t a1 = vld1q_f64(acc + i + 2);
    vst1q_f64(acc + i, vaddq_f64(a0, vmulq_f64(va, vcvt_f64_f32(vget_low_f32(vx)))));
    vst1q_f64(acc + i + 2, vaddq_f64(a1, vmulq_f64(va, vcvt_high_f64_f32(vx))));
  }
  for (; i < n; ++i) acc[i] += alpha * static_cast<double>(x[i]);
}

void add_neon(float* dst, const float* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(dst + i, vaddq_f32(vld1q_f32(dst + i), vld1q_f32(src + i)));
  for (; i < n; ++i) dst[i] += src[i];
}

void relu_neon(float* dst, const float* src, std::size_t n) {
  const float32x4_t zero = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t v = vld1q_f32(src + i);
    // select, not vmaxq: vmaxq propagates NaN where the scalar path yields 0
    vst1q_f32(dst + i, vbslq_f32(vcgtq_f32(v, zero), v, zero));
  }
  for (; i < n; ++i) dst[i] = src[i] > 0.0f ? src[i] : 0.0f;
}

const KernelSet kNeon{"neon", dot_neon, axpy_neon, add_neon, relu_neon};

}  // namespace

const KernelSet* neon_kernels() { return &kNeon; }

#else

const KernelSet* neon_kernels() { return nullptr; }

#endif

}  // namespace pdpp::simd::detail
