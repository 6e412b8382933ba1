#include "pdpp/model.hpp"

#include <cmath>
#include <string>

#include "pdpp/errors.hpp"
#include "pdpp/init.hpp"

PDPP_NAMESPACE_BEGIN

void TransLinearConfig::validate() const {
  if (d_model == 0) throw ConfigError("translinear.d_model must be positive");
  if (n_heads == 0 || d_model % n_heads != 0) {
    throw ConfigError("translinear.d_model (" + std::to_string(d_model) + ") must be divisible by translinear.n_heads (" +
                      std::to_string(n_heads) + ")");
  }
  if (n_layers == 0) throw ConfigError("translinear.n_layers must be at least 1");
}

void PosCNNConfig::validate() const {
  if (kernel % 2 == 0) throw ConfigError("poscnn.kernel must be odd, got " + std::to_string(kernel));
  if (pool_len == 0) throw ConfigError("poscnn.pool_len must be positive");
}

void ClassifierHeadConfig::validate() const {
  if (conv_channels == 0) throw ConfigError("head.conv_channels must be positive");
  if (conv_kernel % 2 == 0) throw ConfigError("head.conv_kernel must be odd, got " + std::to_string(conv_kernel));
  if (pooled_len == 0) throw ConfigError("head.pooled_len must be positive");
  if (n_classes != 2) throw ConfigError("head.n_classes must be 2, got " + std::to_string(n_classes));
}

std::size_t ModelConfig::local_width() const {
  return (poscnn.channels == 0 ? translinear.d_model : poscnn.channels) * poscnn.pool_len;
}

std::size_t ModelConfig::head_input_len() const { return translinear.d_model + local_width(); }

void ModelConfig::validate() const {
  translinear.validate();
  poscnn.validate();
  head.validate();
  fusion.validate();
  if (!use_translinear && !use_poscnn) throw ConfigError("at least one of the TransLinear and PosCNN branches must stay enabled");
  if (use_poscnn && poscnn.use_positional_encoding && translinear.d_model % 2 != 0) {
    throw ConfigError("positional encoding needs an even translinear.d_model");
  }
  if (head.pooled_len > head_input_len()) {
    throw ConfigError("head.pooled_len (" + std::to_string(head.pooled_len) + ") exceeds the concatenated feature length (" +
                      std::to_string(head_input_len()) + ")");
  }
  if (max_len == 0) throw ConfigError("model.max_len must be positive");
}

Tensor positional_encoding(std::size_t length, std::size_t dim) {
  if (length == 0 || dim == 0 || dim % 2 != 0) throw ContractError("positional_encoding: need L >= 1 and even D");
  Tensor pe({length, dim});
  for (std::size_t p = 0; p < length; ++p) {
    for (std::size_t i = 0; i < dim / 2; ++i) {
      const double angle = static_cast<double>(p) / std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(dim));
      pe.at(p, 2 * i) = static_cast<Real>(std::sin(angle));
      pe.at(p, 2 * i + 1) = static_cast<Real>(std::cos(angle));
    }
  }
  return pe;
}

namespace {

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) { return ops::add_bias(ops::matmul(x, w), b); }

// Attention core for one sequence, given its projected queries, keys, values.
Tensor attend(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t n_heads, std::span<const std::uint8_t> mask) {
  const std::size_t d = q.cols(), dh = d / n_heads;
  const Real inv_sqrt = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(dh)));
  std::vector<Tensor> heads;
  heads.reserve(n_heads);
  for (std::size_t h = 0; h < n_heads; ++h) {
    const Tensor qh = ops::slice_cols(q, h * dh, dh);
    const Tensor kh = ops::slice_cols(k, h * dh, dh);
    const Tensor vh = ops::slice_cols(v, h * dh, dh);
    const Tensor scores = ops::scale(ops::matmul(qh, ops::transpose(kh)), inv_sqrt);
    heads.push_back(ops::matmul(ops::masked_softmax(scores, mask), vh));
  }
  return n_heads == 1 ? heads.front() : ops::concat_cols(heads);
}

// Attention over stacked sequences: projections run on all rows at once.
Tensor stacked_attention(const Tensor& x, const AttentionParams& p, std::size_t n_heads, std::span<const Mask> masks,
                         std::size_t seq_len) {
  const Tensor q = linear(x, p.wq, p.bq);
  const Tensor k = ops::matmul(x, p.wk);
  const Tensor v = linear(x, p.wv, p.bv);
  Tensor mixed;
  if (masks.size() == 1) {
    mixed = attend(q, k, v, n_heads, masks[0]);
  } else {
    std::vector<Tensor> per_seq;
    per_seq.reserve(masks.size());
    for (std::size_t s = 0; s < masks.size(); ++s) {
      const std::size_t r0 = s * seq_len;
      per_seq.push_back(attend(ops::slice_rows(q, r0, seq_len), ops::slice_rows(k, r0, seq_len),
                               ops::slice_rows(v, r0, seq_len), n_heads, masks[s]));
    }
    mixed = ops::concat_rows(per_seq);
  }
  return linear(mixed, p.wo, p.bo);
}

void check_masks(const Tensor& x, std::span<const Mask> masks, std::size_t seq_len) {
  if (masks.empty() || x.rank() != 2 || x.rows() != masks.size() * seq_len) {
    throw ShapeError("translinear: " + shape_string(x.shape()) + " does not hold " + std::to_string(masks.size()) +
                     " sequences of length " + std::to_string(seq_len));
  }
  for (const Mask& m : masks) {
    if (m.size() != seq_len) throw ShapeError("translinear: mask length does not match sequence length");
  }
}

AttentionParams init_attention(std::size_t d, Rng& rng) {
  AttentionParams p;
  p.wq = fan_in_uniform({d, d}, d, rng);
  p.bq = filled_parameter({d}, 0);
  p.wk = fan_in_uniform({d, d}, d, rng);
  p.wv = fan_in_uniform({d, d}, d, rng);
  p.bv = filled_parameter({d}, 0);
  p.wo = fan_in_uniform({d, d}, d, rng);
  p.bo = filled_parameter({d}, 0);
  return p;
}

}  // namespace

Tensor multi_head_attention(const Tensor& x, const AttentionParams& p, std::size_t n_heads,
                            std::span<const std::uint8_t> mask) {
  const Mask m(mask.begin(), mask.end());
  check_masks(x, std::span<const Mask>(&m, 1), mask.size());
  if (n_heads == 0 || x.cols() % n_heads != 0) throw ShapeError("multi_head_attention: width not divisible by heads");
  return stacked_attention(x, p, n_heads, std::span<const Mask>(&m, 1), mask.size());
}

Tensor translinear_forward(const Tensor& x, const TransLinearParams& p, const TransLinearConfig& cfg,
                           std::span<const Mask> masks, std::size_t seq_len) {
  check_masks(x, masks, seq_len);
  Tensor h = x;
  if (p.pre_attn) {
    h = ops::layer_norm(ops::add(h, stacked_attention(h, *p.pre_attn, cfg.n_heads, masks, seq_len)), p.pre_gain,
                        p.pre_shift);
  }
  for (const EncoderLayerParams& layer : p.layers) {
    const Tensor a = ops::layer_norm(ops::add(h, stacked_attention(h, layer.attn, cfg.n_heads, masks, seq_len)),
                                     layer.ln1_gain, layer.ln1_shift);
    const Tensor ff = linear(ops::relu(linear(a, layer.ff_w1, layer.ff_b1)), layer.ff_w2, layer.ff_b2);
    h = ops::layer_norm(ops::add(a, ff), layer.ln2_gain, layer.ln2_shift);
  }
  return h;
}

Tensor poscnn_forward(const Tensor& x, const PosCNNParams& p, const PosCNNConfig& cfg, std::span<const std::uint8_t> mask,
                      std::size_t length) {
  if (x.rank() != 2 || mask.size() != x.rows()) throw ShapeError("poscnn_forward: mask length does not match positions");
  if (length == 0 || length > x.rows()) throw ContractError("poscnn_forward: sequence length out of range");
  Tensor h = x;
  if (cfg.use_positional_encoding) h = ops::add(h, positional_encoding(x.rows(), x.cols()));
  h = ops::transpose(ops::mask_rows(h, mask));
  Tensor y = ops::relu(ops::conv1d_same(h, p.conv_w, p.conv_b));
  if (length < y.cols()) y = ops::slice_cols(y, 0, length);
  const Tensor pooled = ops::adaptive_avg_pool(y, cfg.pool_len, mask.first(length));
  return linear(ops::reshape(pooled, {1, pooled.numel()}), p.fc_w, p.fc_b);
}

Tensor classify(const Tensor& global_feat, const Tensor& local_feat, const HeadParams& p, const ClassifierHeadConfig& cfg) {
  const Tensor joined = ops::concat_cols({ops::reshape(global_feat, {1, global_feat.numel()}),
                                          ops::reshape(local_feat, {1, local_feat.numel()})});
  const Tensor conv = ops::relu(ops::conv1d_same(joined, p.conv_w, p.conv_b));
  const Tensor pooled = ops::adaptive_avg_pool(conv, cfg.pooled_len);
  return linear(ops::reshape(pooled, {1, pooled.numel()}), p.fc_w, p.fc_b);
}

Tensor& Model::add_param(std::string name, Tensor t) {
  params_.emplace_back(std::move(name), std::move(t));
  return params_.back().second;
}

Model::Model(const ModelConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t d = cfg_.translinear.d_model;

  if (cfg_.uses_base_embedding()) {
    base_ = BaseEmbeddingParams::init(rng);
    add_param("base.table", base_->table);
    add_param("base.projection", base_->projection);
    add_param("base.projection_bias", base_->projection_bias);
  }

  in_w_ = add_param("input.weight", d == kPretrainedDim ? identity_parameter(d) : fan_in_uniform({kPretrainedDim, d}, kPretrainedDim, rng));
  in_b_ = add_param("input.bias", filled_parameter({d}, 0));

  auto add_attention = [this](const std::string& prefix, const AttentionParams& a) {
    add_param(prefix + ".wq", a.wq);
    add_param(prefix + ".bq", a.bq);
    add_param(prefix + ".wk", a.wk);
    add_param(prefix + ".wv", a.wv);
    add_param(prefix + ".bv", a.bv);
    add_param(prefix + ".wo", a.wo);
    add_param(prefix + ".bo", a.bo);
  };

  if (cfg_.use_translinear) {
    TransLinearParams tl;
    if (cfg_.translinear.use_pre_attention) {
      tl.pre_attn = init_attention(d, rng);
      add_attention("translinear.pre_attn", *tl.pre_attn);
      tl.pre_gain = add_param("translinear.pre_norm.gain", filled_parameter({d}, 1));
      tl.pre_shift = add_param("translinear.pre_norm.shift", filled_parameter({d}, 0));
    }
    const std::size_t ff = cfg_.translinear.ff_width();
    for (std::size_t i = 0; i < cfg_.translinear.n_layers; ++i) {
      const std::string prefix = "translinear.layer" + std::to_string(i);
      EncoderLayerParams layer;
      layer.attn = init_attention(d, rng);
      add_attention(prefix + ".attn", layer.attn);
      layer.ln1_gain = add_param(prefix + ".norm1.gain", filled_parameter({d}, 1));
      layer.ln1_shift = add_param(prefix + ".norm1.shift", filled_parameter({d}, 0));
      layer.ff_w1 = add_param(prefix + ".ff.w1", fan_in_uniform({d, ff}, d, rng));
      layer.ff_b1 = add_param(prefix + ".ff.b1", filled_parameter({ff}, 0));
      layer.ff_w2 = add_param(prefix + ".ff.w2", fan_in_uniform({ff, d}, ff, rng));
      layer.ff_b2 = add_param(prefix + ".ff.b2", filled_parameter({d}, 0));
      layer.ln2_gain = add_param(prefix + ".norm2.gain", filled_parameter({d}, 1));
      layer.ln2_shift = add_param(prefix + ".norm2.shift", filled_parameter({d}, 0));
      tl.layers.push_back(std::move(layer));
    }
    translinear_ = std::move(tl);
  }

  if (cfg_.use_poscnn) {
    const std::size_t ch = cfg_.poscnn.channels == 0 ? d : cfg_.poscnn.channels;
    const std::size_t k = cfg_.poscnn.kernel;
    const std::size_t cp = cfg_.local_width();
    PosCNNParams pc;
    pc.conv_w = add_param("poscnn.conv.weight", fan_in_uniform({ch, d, k}, d * k, rng));
    pc.conv_b = add_param("poscnn.conv.bias", filled_parameter({ch}, 0));
    pc.fc_w = add_param("poscnn.fc.weight", fan_in_uniform({cp, cp}, cp, rng));
    pc.fc_b = add_param("poscnn.fc.bias", filled_parameter({cp}, 0));
    poscnn_ = std::move(pc);
  }

  const ClassifierHeadConfig& hc = cfg_.head;
  head_.conv_w = add_param("head.conv.weight", fan_in_uniform({hc.conv_channels, 1, hc.conv_kernel}, hc.conv_kernel, rng));
  head_.conv_b = add_param("head.conv.bias", filled_parameter({hc.conv_channels}, 0));
  const std::size_t flat = hc.conv_channels * hc.pooled_len;
  head_.fc_w = add_param("head.fc.weight", fan_in_uniform({flat, hc.n_classes}, flat, rng));
  head_.fc_b = add_param("head.fc.bias", filled_parameter({hc.n_classes}, 0));
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : params_) n += t.numel();
  return n;
}

Tensor Model::forward(const PaddedBatch& batch) const {
  const std::size_t len = batch.max_len;
  if (batch.size == 0 || batch.features.rank() != 2 || batch.features.rows() != batch.size * len ||
      batch.features.cols() != kPretrainedDim) {
    throw ShapeError("Model::forward: malformed batch");
  }
  if (len > cfg_.max_len) {
    throw DataError("batch length " + std::to_string(len) + " exceeds model.max_len " + std::to_string(cfg_.max_len));
  }

  // The input layer is linear, so the fused features are projected term by
  // term: (a*X + (1-a)*B) W = a*XW + (1-a)*BW, where the rows of BW come from
  // the projected 22-row vocabulary table.
  Tensor h = ops::matmul(batch.features, in_w_);
  if (base_) {
    const Tensor vocab = ops::add_bias(ops::matmul(base_->table, base_->projection), base_->projection_bias);
    const Tensor base_rows = ops::mask_rows(ops::gather_rows(ops::matmul(vocab, in_w_), batch.tokens), pad_mask(batch.tokens));
    h = ops::add(ops::scale(h, cfg_.fusion.alpha), ops::scale(base_rows, Real{1} - cfg_.fusion.alpha));
  }
  h = ops::add_bias(h, in_b_);
  const std::size_t d = cfg_.translinear.d_model;

  Tensor encoded;
  if (translinear_) encoded = translinear_forward(h, *translinear_, cfg_.translinear, batch.masks, len);

  std::vector<Tensor> logits;
  logits.reserve(batch.size);
  for (std::size_t b = 0; b < batch.size; ++b) {
    const Mask& mask = batch.masks[b];
    Tensor global = translinear_ ? ops::masked_mean_rows(ops::slice_rows(encoded, b * len, len), mask) : Tensor({1, d});
    Tensor local = poscnn_ ? poscnn_forward(ops::slice_rows(h, b * len, len), *poscnn_, cfg_.poscnn, mask, batch.lengths[b])
                           : Tensor({1, cfg_.local_width()});
    logits.push_back(classify(global, local, head_, cfg_.head));
  }
  return batch.size == 1 ? logits.front() : ops::concat_rows(logits);
}

PDPP_NAMESPACE_END
