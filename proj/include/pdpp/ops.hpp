#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pdpp/tape.hpp"
#include "pdpp/tensor.hpp"

PDPP_NAMESPACE_BEGIN

/// Per-position validity flags; 0 marks padding.
using Mask = std::vector<std::uint8_t>;

inline constexpr Real kLayerNormEps = Real(1e-5);
inline constexpr Real kLogFloor = Real(1e-12);

// Differentiable primitives. Each one records itself on the active tape when
// any input requires a gradient. Matrices are rank-2, row-major.
namespace ops {

/// [M x K] * [K x N] -> [M x N]
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, Real factor);
/// [M x N] + [N], the bias broadcast over rows.
Tensor add_bias(const Tensor& x, const Tensor& bias);
Tensor relu(const Tensor& x);

/// Softmax over the last axis with max subtraction. Throws NumericError on NaN.
Tensor softmax(const Tensor& x);
/// Row softmax of a matrix where columns with key_mask == 0 receive zero
/// probability. Every row needs at least one unmasked column.
Tensor masked_softmax(const Tensor& x, std::span<const std::uint8_t> key_mask);
/// ln(max(x, floor)); the gradient is zero where the clamp is active.
Tensor log_clamped(const Tensor& x, Real floor = kLogFloor);

/// Normalizes each row over its features, then applies gain and shift.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, Real eps = kLayerNormEps);

/// Convolution over positions with zero padding so the output keeps length L.
/// x: [C_in x L], weight: [C_out x C_in x K] with K odd, bias: [C_out].
Tensor conv1d_same(const Tensor& x, const Tensor& weight, const Tensor& bias);

/// x: [C x L] -> [C x out_len]. Bin i averages positions
/// [floor(i*L/out_len), floor((i+1)*L/out_len)).
Tensor adaptive_avg_pool(const Tensor& x, std::size_t out_len);
/// Same bins, but each one averages only positions with mask != 0; a bin with
/// no such position yields 0.
Tensor adaptive_avg_pool(const Tensor& x, std::size_t out_len, std::span<const std::uint8_t> mask);

/// Rows of `table` selected by index: [V x D] -> [n x D].
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> index);
/// Zeroes rows whose mask entry is 0.
Tensor mask_rows(const Tensor& x, std::span<const std::uint8_t> mask);
/// Mean over rows with mask != 0: [L x D] -> [1 x D].
Tensor masked_mean_rows(const Tensor& x, std::span<const std::uint8_t> mask);
/// Column means: [M x N] -> [1 x N].
Tensor mean_rows(const Tensor& x);
/// Sum of all entries -> [1].
Tensor sum(const Tensor& x);

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor reshape(const Tensor& x, Shape shape);

}  // namespace ops

PDPP_NAMESPACE_END
