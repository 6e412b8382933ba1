#pragma once

#include <cstddef>

#include "pdpp/simd/kernels.hpp"

namespace pdpp::simd::detail {

double dot_scalar(const float* x, const float* y, std::size_t n);
void axpy_scalar(double* acc, double alpha, const float* x, std::size_t n);
void add_scalar(float* dst, const float* src, std::size_t n);
void relu_scalar(float* dst, const float* src, std::size_t n);

// Null when the variant was not compiled for this target.
const KernelSet* avx2_kernels();
const KernelSet* neon_kernels();

}  // namespace pdpp::simd::detail
