#include "pdpp/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pdpp/errors.hpp"
#include "pdpp/simd/kernels.hpp"

PDPP_NAMESPACE_BEGIN

namespace ops {

namespace {

// Pushes a node when a tape is active and some input needs a gradient; the
// output then needs one too.
template <class Fn>
void record(const char* op, std::vector<Tensor> inputs, Tensor& out, Fn&& backward) {
  Tape* tape = Tape::active();
  if (tape == nullptr) return;
  const bool needed = std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
  if (!needed) return;
  out.set_requires_grad(true);
  tape->push(op, std::move(inputs), out, std::forward<Fn>(backward));
}

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw ShapeError(std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

void store(Real* dst, const std::vector<double>& acc) {
  for (std::size_t i = 0; i < acc.size(); ++i) dst[i] = static_cast<Real>(acc[i]);
}

}  // namespace

namespace {

// Row-major copy of the transpose of an r x c block.
std::vector<Real> transposed(const Real* src, std::size_t r, std::size_t c) {
  std::vector<Real> t(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) t[j * r + i] = src[i * c + j];
  }
  return t;
}

// Long reductions run as contiguous dot products; short ones as row updates.
constexpr std::size_t kDotFormMin = 32;

// out[i, j] = sum_p a[i, p] * b[p, j] for a: m x k, b: k x n.
void gemm(const Real* a, const Real* b, Real* out, std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
  if (k >= kDotFormMin) {
    const std::vector<Real> bt = transposed(b, k, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Real v = static_cast<Real>(simd::dot(a + i * k, bt.data() + j * k, k));
        out[i * n + j] = accumulate ? out[i * n + j] + v : v;
      }
    }
    return;
  }
  std::vector<double> acc(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const Real* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      if (arow[p] != Real{0}) simd::axpy(acc.data(), arow[p], b + p * n, n);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Real v = static_cast<Real>(acc[j]);
      out[i * n + j] = accumulate ? out[i * n + j] + v : v;
    }
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw ShapeError("matmul: inner dimensions disagree: " + shape_string(a.shape()) + " x " +
                     shape_string(b.shape()));
  }
  Tensor out({m, n});
  gemm(a.ptr(), b.ptr(), out.ptr(), m, k, n, false);
  record("matmul", {a, b}, out, [a, b, out, m, k, n]() mutable {
    const Real* g = out.grad().data();
    if (a.requires_grad()) {
      // dA = G B^T: row i of G against row p of B.
      Real* ga = a.grad().data();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          ga[i * k + p] += static_cast<Real>(simd::dot(g + i * n, b.ptr() + p * n, n));
        }
      }
    }
    if (b.requires_grad()) {
      // dB = A^T G
      const std::vector<Real> at = transposed(a.ptr(), m, k);
      gemm(at.data(), g, b.grad().data(), k, m, n, true);
    }
  });
  return out;
}

Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = a[i * c + j];
  record("transpose", {a}, out, [a, out, r, c]() mutable {
    const auto g = out.grad();
    auto ga = a.grad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += g[j * r + i];
  });
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.clone();
  simd::add(out.ptr(), b.ptr(), out.numel());
  record("add", {a, b}, out, [a, b, out]() mutable {
    const Real* g = out.grad().data();
    if (a.requires_grad()) simd::add(a.grad().data(), g, a.numel());
    if (b.requires_grad()) simd::add(b.grad().data(), g, b.numel());
  });
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a[i] * b[i];
  record("mul", {a, b}, out, [a, b, out]() mutable {
    const auto g = out.grad();
    if (a.requires_grad()) {
      auto ga = a.grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
    }
    if (b.requires_grad()) {
      auto gb = b.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
    }
  });
  return out;
}

Tensor scale(const Tensor& a, Real factor) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a[i] * factor;
  record("scale", {a}, out, [a, out, factor]() mutable {
    const auto g = out.grad();
    auto ga = a.grad();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
  });
  return out;
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_matrix(x, "add_bias");
  const std::size_t m = x.rows(), n = x.cols();
  if (bias.numel() != n) {
    throw ShapeError("add_bias: bias " + shape_string(bias.shape()) + " does not match " + shape_string(x.shape()));
  }
  Tensor out = x.clone();
  for (std::size_t i = 0; i < m; ++i) simd::add(out.ptr() + i * n, bias.ptr(), n);
  record("add_bias", {x, bias}, out, [x, bias, out, m, n]() mutable {
    const Real* g = out.grad().data();
    if (x.requires_grad()) simd::add(x.grad().data(), g, m * n);
    if (bias.requires_grad()) {
      auto gb = bias.grad();
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += g[i * n + j];
        gb[j] += static_cast<Real>(s);
      }
    }
  });
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out(x.shape());
  simd::relu(out.ptr(), x.ptr(), x.numel());
  record("relu", {x}, out, [x, out]() mutable {
    const auto g = out.grad();
    auto gx = x.grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x[i] > Real{0}) gx[i] += g[i];
    }
  });
  return out;
}

namespace {

// Softmax of each length-k row of `in`; masked columns (mask[j] == 0) get 0.
void softmax_rows(const Real* in, Real* out, std::size_t rows, std::size_t k, const std::uint8_t* mask) {
  std::vector<double> exps;
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* x = in + r * k;
    Real* y = out + r * k;
    Real mx = -std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      if (std::isnan(x[j])) throw NumericError("softmax: NaN input");
      if (mask == nullptr || mask[j]) mx = std::max(mx, x[j]);
    }
    double total = 0.0;
    exps.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      exps[j] = (mask == nullptr || mask[j]) ? std::exp(static_cast<double>(x[j]) - mx) : 0.0;
      total += exps[j];
    }
    for (std::size_t j = 0; j < k; ++j) y[j] = static_cast<Real>(exps[j] / total);
  }
}

void softmax_backward(const Tensor& x, const Tensor& y, std::size_t rows, std::size_t k) {
  const auto g = y.grad();
  auto gx = x.grad();
  for (std::size_t r = 0; r < rows; ++r) {
    double inner = 0.0;
    for (std::size_t j = 0; j < k; ++j) inner += static_cast<double>(g[r * k + j]) * y[r * k + j];
    for (std::size_t j = 0; j < k; ++j) {
      gx[r * k + j] += static_cast<Real>(y[r * k + j] * (g[r * k + j] - inner));
    }
  }
}

}  // namespace

Tensor softmax(const Tensor& x) {
  const std::size_t k = x.shape().back();
  const std::size_t rows = x.numel() / k;
  Tensor out(x.shape());
  softmax_rows(x.ptr(), out.ptr(), rows, k, nullptr);
  record("softmax", {x}, out, [x, out, rows, k]() mutable { softmax_backward(x, out, rows, k); });
  return out;
}

Tensor masked_softmax(const Tensor& x, std::span<const std::uint8_t> key_mask) {
  require_matrix(x, "masked_softmax");
  const std::size_t rows = x.rows(), k = x.cols();
  if (key_mask.size() != k) throw ShapeError("masked_softmax: mask length does not match columns");
  if (std::none_of(key_mask.begin(), key_mask.end(), [](std::uint8_t m) { return m != 0; })) {
    throw ContractError("masked_softmax: every position is masked");
  }
  Tensor out(x.shape());
  softmax_rows(x.ptr(), out.ptr(), rows, k, key_mask.data());
  record("masked_softmax", {x}, out, [x, out, rows, k]() mutable { softmax_backward(x, out, rows, k); });
  return out;
}

Tensor log_clamped(const Tensor& x, Real floor) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = std::log(std::max(x[i], floor));
  record("log_clamped", {x}, out, [x, out, floor]() mutable {
    const auto g = out.grad();
    auto gx = x.grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x[i] >= floor) gx[i] += g[i] / x[i];
    }
  });
  return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, Real eps) {
  const std::size_t d = x.shape().back();
  const std::size_t rows = x.numel() / d;
  if (gain.numel() != d || shift.numel() != d) {
    throw ShapeError("layer_norm: affine parameters do not match feature width " + std::to_string(d));
  }
  Tensor out(x.shape());
  std::vector<Real> xhat(x.numel());
  std::vector<double> rstd(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* xr = x.ptr() + r * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xr[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<double>(d);
    rstd[r] = 1.0 / std::sqrt(var + static_cast<double>(eps));
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (xr[j] - mean) * rstd[r];
      xhat[r * d + j] = static_cast<Real>(h);
      out[r * d + j] = static_cast<Real>(h * gain[j] + shift[j]);
    }
  }
  record("layer_norm", {x, gain, shift}, out,
         [x, gain, shift, out, xhat = std::move(xhat), rstd = std::move(rstd), rows, d]() mutable {
           const auto g = out.grad();
           if (gain.requires_grad() || shift.requires_grad()) {
             for (std::size_t j = 0; j < d; ++j) {
               double sg = 0.0, ss = 0.0;
               for (std::size_t r = 0; r < rows; ++r) {
                 sg += static_cast<double>(g[r * d + j]) * xhat[r * d + j];
                 ss += g[r * d + j];
               }
               if (gain.requires_grad()) gain.grad()[j] += static_cast<Real>(sg);
               if (shift.requires_grad()) shift.grad()[j] += static_cast<Real>(ss);
             }
           }
           if (!x.requires_grad()) return;
           auto gx = x.grad();
           std::vector<double> dh(d);
           for (std::size_t r = 0; r < rows; ++r) {
             double mean_dh = 0.0, mean_dh_h = 0.0;
             for (std::size_t j = 0; j < d; ++j) {
               dh[j] = static_cast<double>(g[r * d + j]) * gain[j];
               mean_dh += dh[j];
               mean_dh_h += dh[j] * xhat[r * d + j];
             }
             mean_dh /= static_cast<double>(d);
             mean_dh_h /= static_cast<double>(d);
             for (std::size_t j = 0; j < d; ++j) {
               gx[r * d + j] += static_cast<Real>(rstd[r] * (dh[j] - mean_dh - xhat[r * d + j] * mean_dh_h));
             }
           }
         });
  return out;
}

Tensor conv1d_same(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_matrix(x, "conv1d_same");
  if (weight.rank() != 3) throw ShapeError("conv1d_same: weight must be [C_out x C_in x K]");
  const std::size_t cin = x.rows(), len = x.cols();
  const std::size_t cout = weight.dim(0), kw = weight.dim(2);
  if (weight.dim(1) != cin) {
    throw ShapeError("conv1d_same: weight " + shape_string(weight.shape()) + " does not match input " +
                     shape_string(x.shape()));
  }
  if (kw % 2 == 0) throw ShapeError("conv1d_same: kernel width must be odd");
  if (bias.numel() != cout) throw ShapeError("conv1d_same: bias length must equal output channels");
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(kw / 2);
  const std::ptrdiff_t L = static_cast<std::ptrdiff_t>(len);

  // Output positions i whose tap k reads input position i + k - pad in range.
  auto span_for = [pad, L](std::size_t k) {
    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(L, L - shift);
    return std::pair{lo, std::max(lo, hi)};
  };

  Tensor out({cout, len});
  std::vector<double> acc(len);
  for (std::size_t c = 0; c < cout; ++c) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(bias[c]));
    for (std::size_t ci = 0; ci < cin; ++ci) {
      for (std::size_t k = 0; k < kw; ++k) {
        const Real w = weight[(c * cin + ci) * kw + k];
        if (w == Real{0}) continue;
        const auto [lo, hi] = span_for(k);
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad;
        simd::axpy(acc.data() + lo, w, x.ptr() + ci * len + (lo + shift), static_cast<std::size_t>(hi - lo));
      }
    }
    store(out.ptr() + c * len, acc);
  }

  record("conv1d_same", {x, weight, bias}, out, [x, weight, bias, out, cin, cout, kw, len, pad, span_for]() mutable {
    const Real* g = out.grad().data();
    if (bias.requires_grad()) {
      auto gb = bias.grad();
      for (std::size_t c = 0; c < cout; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += g[c * len + i];
        gb[c] += static_cast<Real>(s);
      }
    }
    if (weight.requires_grad()) {
      auto gw = weight.grad();
      for (std::size_t c = 0; c < cout; ++c)
        for (std::size_t ci = 0; ci < cin; ++ci)
          for (std::size_t k = 0; k < kw; ++k) {
            const auto [lo, hi] = span_for(k);
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad;
            gw[(c * cin + ci) * kw + k] += static_cast<Real>(
                simd::dot(g + c * len + lo, x.ptr() + ci * len + (lo + shift), static_cast<std::size_t>(hi - lo)));
          }
    }
    if (x.requires_grad()) {
      std::vector<double> acc(cin * len, 0.0);
      for (std::size_t c = 0; c < cout; ++c)
        for (std::size_t ci = 0; ci < cin; ++ci)
          for (std::size_t k = 0; k < kw; ++k) {
            const Real w = weight[(c * cin + ci) * kw + k];
            if (w == Real{0}) continue;
            const auto [lo, hi] = span_for(k);
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad;
            simd::axpy(acc.data() + ci * len + (lo + shift), w, g + c * len + lo, static_cast<std::size_t>(hi - lo));
          }
      auto gx = x.grad();
      for (std::size_t j = 0; j < acc.size(); ++j) gx[j] += static_cast<Real>(acc[j]);
    }
  });
  return out;
}

namespace {

Tensor pool_bins(const Tensor& x, std::size_t out_len, const std::uint8_t* mask) {
  require_matrix(x, "adaptive_avg_pool");
  const std::size_t c = x.rows(), len = x.cols();
  if (out_len == 0 || out_len > len) {
    throw ContractError("adaptive_avg_pool: cannot form " + std::to_string(out_len) + " non-empty bins from " +
                        std::to_string(len) + " positions");
  }
  // Per position weight: 1 / (unmasked positions in its bin), or 0.
  std::vector<std::size_t> bin_of(len);
  std::vector<Real> weight(len, Real{0});
  std::vector<std::size_t> live(out_len, 0);
  for (std::size_t b = 0; b < out_len; ++b) {
    const std::size_t lo = b * len / out_len, hi = (b + 1) * len / out_len;
    for (std::size_t p = lo; p < hi; ++p) {
      bin_of[p] = b;
      if (mask == nullptr || mask[p]) ++live[b];
    }
    for (std::size_t p = lo; p < hi; ++p) {
      if (mask == nullptr || mask[p]) weight[p] = Real{1} / static_cast<Real>(live[b]);
    }
  }

  Tensor out({c, out_len});
  for (std::size_t ch = 0; ch < c; ++ch) {
    std::vector<double> acc(out_len, 0.0);
    for (std::size_t p = 0; p < len; ++p) {
      if (weight[p] != Real{0}) acc[bin_of[p]] += x[ch * len + p];
    }
    for (std::size_t b = 0; b < out_len; ++b) {
      if (live[b] > 0) acc[b] /= static_cast<double>(live[b]);
    }
    store(out.ptr() + ch * out_len, acc);
  }
  record("adaptive_avg_pool", {x}, out, [x, out, bin_of = std::move(bin_of), weight = std::move(weight), c, len, out_len]() mutable {
    const auto g = out.grad();
    auto gx = x.grad();
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t p = 0; p < len; ++p) gx[ch * len + p] += weight[p] * g[ch * out_len + bin_of[p]];
    }
  });
  return out;
}

}  // namespace

Tensor adaptive_avg_pool(const Tensor& x, std::size_t out_len) { return pool_bins(x, out_len, nullptr); }

Tensor adaptive_avg_pool(const Tensor& x, std::size_t out_len, std::span<const std::uint8_t> mask) {
  require_matrix(x, "adaptive_avg_pool");
  if (mask.size() != x.cols()) throw ShapeError("adaptive_avg_pool: mask length does not match positions");
  return pool_bins(x, out_len, mask.data());
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> index) {
  require_matrix(table, "gather_rows");
  const std::size_t v = table.rows(), d = table.cols();
  if (index.empty()) throw ContractError("gather_rows: empty index");
  for (std::size_t t : index) {
    if (t >= v) throw ContractError("gather_rows: index " + std::to_string(t) + " out of range for " + std::to_string(v) + " rows");
  }
  Tensor out({index.size(), d});
  for (std::size_t r = 0; r < index.size(); ++r) {
    std::copy_n(table.ptr() + index[r] * d, d, out.ptr() + r * d);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  record("gather_rows", {table}, out, [table, out, idx = std::move(idx), d]() mutable {
    const Real* g = out.grad().data();
    Real* gt = table.grad().data();
    for (std::size_t r = 0; r < idx.size(); ++r) simd::add(gt + idx[r] * d, g + r * d, d);
  });
  return out;
}

Tensor mask_rows(const Tensor& x, std::span<const std::uint8_t> mask) {
  require_matrix(x, "mask_rows");
  const std::size_t m = x.rows(), n = x.cols();
  if (mask.size() != m) throw ShapeError("mask_rows: mask length does not match rows");
  Tensor out = x.clone();
  for (std::size_t i = 0; i < m; ++i) {
    if (!mask[i]) std::fill_n(out.ptr() + i * n, n, Real{0});
  }
  Mask keep(mask.begin(), mask.end());
  record("mask_rows", {x}, out, [x, out, keep = std::move(keep), m, n]() mutable {
    const Real* g = out.grad().data();
    Real* gx = x.grad().data();
    for (std::size_t i = 0; i < m; ++i) {
      if (keep[i]) simd::add(gx + i * n, g + i * n, n);
    }
  });
  return out;
}

Tensor masked_mean_rows(const Tensor& x, std::span<const std::uint8_t> mask) {
  require_matrix(x, "masked_mean_rows");
  const std::size_t m = x.rows(), n = x.cols();
  if (mask.size() != m) throw ShapeError("masked_mean_rows: mask length does not match rows");
  const std::size_t count = static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; }));
  if (count == 0) throw ContractError("masked_mean_rows: no unmasked rows");
  Tensor out({1, n});
  std::vector<double> acc(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (mask[i]) simd::axpy(acc.data(), 1.0, x.ptr() + i * n, n);
  }
  for (std::size_t j = 0; j < n; ++j) out[j] = static_cast<Real>(acc[j] / static_cast<double>(count));
  Mask keep(mask.begin(), mask.end());
  record("masked_mean_rows", {x}, out, [x, out, keep = std::move(keep), m, n, count]() mutable {
    const auto g = out.grad();
    auto gx = x.grad();
    const Real inv = Real{1} / static_cast<Real>(count);
    for (std::size_t i = 0; i < m; ++i) {
      if (!keep[i]) continue;
      for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[j] * inv;
    }
  });
  return out;
}

Tensor mean_rows(const Tensor& x) {
  require_matrix(x, "mean_rows");
  Mask all(x.rows(), 1);
  return masked_mean_rows(x, all);
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (Real v : x.data()) s += v;
  Tensor out = Tensor::scalar(static_cast<Real>(s));
  record("sum", {x}, out, [x, out]() mutable {
    const Real g = out.grad()[0];
    for (Real& v : x.grad()) v += g;
  });
  return out;
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count) {
  require_matrix(x, "slice_rows");
  const std::size_t n = x.cols();
  if (count == 0 || begin + count > x.rows()) throw ShapeError("slice_rows: range out of bounds");
  Tensor out({count, n});
  std::copy_n(x.ptr() + begin * n, count * n, out.ptr());
  record("slice_rows", {x}, out, [x, out, begin, count, n]() mutable {
    simd::add(x.grad().data() + begin * n, out.grad().data(), count * n);
  });
  return out;
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count) {
  require_matrix(x, "slice_cols");
  const std::size_t m = x.rows(), n = x.cols();
  if (count == 0 || begin + count > n) throw ShapeError("slice_cols: range out of bounds");
  Tensor out({m, count});
  for (std::size_t i = 0; i < m; ++i) std::copy_n(x.ptr() + i * n + begin, count, out.ptr() + i * count);
  record("slice_cols", {x}, out, [x, out, begin, count, m, n]() mutable {
    const Real* g = out.grad().data();
    Real* gx = x.grad().data();
    for (std::size_t i = 0; i < m; ++i) simd::add(gx + i * n + begin, g + i * count, count);
  });
  return out;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractError("concat_rows: nothing to concatenate");
  const std::size_t n = parts.front().cols();
  std::size_t m = 0;
  for (const Tensor& p : parts) {
    if (p.cols() != n) throw ShapeError("concat_rows: column counts differ");
    m += p.rows();
  }
  Tensor out({m, n});
  std::size_t off = 0;
  for (const Tensor& p : parts) {
    std::copy_n(p.ptr(), p.numel(), out.ptr() + off);
    off += p.numel();
  }
  record("concat_rows", parts, out, [parts, out]() mutable {
    const Real* g = out.grad().data();
    std::size_t off = 0;
    for (const Tensor& p : parts) {
      if (p.requires_grad()) simd::add(p.grad().data(), g + off, p.numel());
      off += p.numel();
    }
  });
  return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractError("concat_cols: nothing to concatenate");
  const std::size_t m = parts.front().rows();
  std::size_t n = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != m) throw ShapeError("concat_cols: row counts differ");
    n += p.cols();
  }
  Tensor out({m, n});
  std::size_t col = 0;
  for (const Tensor& p : parts) {
    const std::size_t w = p.cols();
    for (std::size_t i = 0; i < m; ++i) std::copy_n(p.ptr() + i * w, w, out.ptr() + i * n + col);
    col += w;
  }
  record("concat_cols", parts, out, [parts, out, m, n]() mutable {
    const Real* g = out.grad().data();
    std::size_t col = 0;
    for (const Tensor& p : parts) {
      const std::size_t w = p.cols();
      if (p.requires_grad()) {
        Real* gp = p.grad().data();
        for (std::size_t i = 0; i < m; ++i) simd::add(gp + i * w, g + i * n + col, w);
      }
      col += w;
    }
  });
  return out;
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw ShapeError("reshape: " + shape_string(x.shape()) + " cannot become " + shape_string(shape));
  }
  Tensor out(std::move(shape), std::vector<Real>(x.data().begin(), x.data().end()));
  record("reshape", {x}, out, [x, out]() mutable { simd::add(x.grad().data(), out.grad().data(), x.numel()); });
  return out;
}

}  // namespace ops

PDPP_NAMESPACE_END
