#include "kernels_internal.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define PDPP_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace pdpp::simd::detail {

#if defined(PDPP_HAVE_AVX2_KERNELS)

namespace {

#define PDPP_AVX2 __attribute__((target("avx2,fma")))

PDPP_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

PDPP_AVX2 double dot_avx2(const float* x, const float* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vx = _mm256_loadu_ps(x + i);
    __m256 vy = _mm256_loadu_ps(y + i);
    __m256d xl = _mm256_cvtps_pd(_mm256_castps256_ps128(vx));
    __m256d xh = _mm256_cvtps_pd(_mm256_extractf128_ps(vx, 1));
    __m256d yl = _mm256_cvtps_pd(_mm256_castps256_ps128(vy));
    __m256d yh = _mm256_cvtps_pd(_mm256_extractf128_ps(vy, 1));
    // float*float is exact in double, so fma == mul+add here
    acc0 = _mm256_fmadd_pd(xl, yl, acc0);
    acc1 = _mm256_fmadd_pd(xh, yh, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += static_cast<double>(x[i]) * static_cast<double>(y[i]);
  return s;
}

// mul then add (not fma) so results match the scalar kernel bit for bit even
// when alpha is not representable as a float.
PDPP_AVX2 void axpy_avx2(double* acc, double alpha, const float* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vx = _mm256_loadu_ps(x + i);
    __m256d xl = _mm256_cvtps_pd(_mm256_castps256_ps128(vx));
    __m256d xh = _mm256_cvtps_pd(_mm256_extractf128_ps(vx, 1));
    __m256d a0 = _mm256_loadu_pd(acc + i);
    __m256d a1 = _mm256_loadu_pd(acc + i + 4);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(a0, _mm256_mul_pd(va, xl)));
    _mm256_storeu_pd(acc + i + 4, _mm256_add_pd(a1, _mm256_mul_pd(va, xh)));
  }
  for (; i < n; ++i) acc[i] += alpha * static_cast<double>(x[i]);
}

PDPP_AVX2 void add_avx2(float* dst, const float* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(dst + i), _mm256_loadu_ps(src + i)));
  }
  for (; i < n; ++i) dst[i] += src[i];
}

PDPP_AVX2 void relu_avx2(float* dst, const float* src, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    // max_ps returns the second operand for NaN and signed zeros, matching
    // the scalar `x > 0 ? x : 0`.
    _mm256_storeu_ps(dst + i, _mm256_max_ps(_mm256_loadu_ps(src + i), zero));
  }
  for (; i < n; ++i) dst[i] = src[i] > 0.0f ? src[i] : 0.0f;
}

#undef PDPP_AVX2

const KernelSet kAvx2{"avx2", dot_avx2, axpy_avx2, add_avx2, relu_avx2};

}  // namespace

const KernelSet* avx2_kernels() {
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
  return nullptr;
}

#else

const KernelSet* avx2_kernels() { return nullptr; }

#endif

}  // namespace pdpp::simd::detail
