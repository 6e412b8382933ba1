#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdpp/batch.hpp"
#include "pdpp/embedding.hpp"
#include "pdpp/ops.hpp"
#include "pdpp/rng.hpp"
#include "pdpp/tensor.hpp"

PDPP_NAMESPACE_BEGIN

struct TransLinearConfig {
  std::size_t d_model = kPretrainedDim;
  std::size_t n_heads = 8;
  std::size_t n_layers = 4;
  std::size_t d_ff = 0;  // 0: 4 * d_model
  bool use_pre_attention = true;

  std::size_t ff_width() const { return d_ff == 0 ? 4 * d_model : d_ff; }
  void validate() const;
};

struct PosCNNConfig {
  std::size_t kernel = 3;
  std::size_t channels = 0;  // 0: d_model
  std::size_t pool_len = 1;
  bool use_positional_encoding = true;

  void validate() const;
};

struct ClassifierHeadConfig {
  std::size_t conv_channels = 4;
  std::size_t conv_kernel = 3;
  std::size_t pooled_len = 64;
  std::size_t n_classes = 2;

  void validate() const;
};

struct ModelConfig {
  TransLinearConfig translinear;
  PosCNNConfig poscnn;
  ClassifierHeadConfig head;
  FusionConfig fusion;
  bool use_translinear = true;
  bool use_poscnn = true;
  std::size_t max_len = 512;

  std::size_t local_width() const;
  /// Length of the concatenated global + local vector fed to the head.
  std::size_t head_input_len() const;
  /// alpha == 1 leaves nothing for the learned embedding to contribute.
  bool uses_base_embedding() const { return fusion.alpha < Real{1}; }
  void validate() const;
};

/// Sinusoidal table: PE[p, 2i] = sin(p / 10000^(2i/D)), PE[p, 2i+1] = cos(same).
Tensor positional_encoding(std::size_t length, std::size_t dim);

struct AttentionParams {
  Tensor wq, bq, wk, wv, bv, wo, bo;
};

struct EncoderLayerParams {
  AttentionParams attn;
  Tensor ln1_gain, ln1_shift;
  Tensor ff_w1, ff_b1, ff_w2, ff_b2;
  Tensor ln2_gain, ln2_shift;
};

struct TransLinearParams {
  std::optional<AttentionParams> pre_attn;
  Tensor pre_gain, pre_shift;
  std::vector<EncoderLayerParams> layers;
};

struct PosCNNParams {
  Tensor conv_w, conv_b;  // [C x D x k], [C]
  Tensor fc_w, fc_b;      // [CP x CP], [CP]
};

struct HeadParams {
  Tensor conv_w, conv_b;  // [conv_channels x 1 x k], [conv_channels]
  Tensor fc_w, fc_b;      // [conv_channels * pooled_len x n_classes], [n_classes]
};

/// Scaled dot-product attention over `n_heads` heads of one sequence. Keys
/// with mask 0 get zero weight. Throws ContractError if every key is masked.
Tensor multi_head_attention(const Tensor& x, const AttentionParams& p, std::size_t n_heads,
                            std::span<const std::uint8_t> mask);

/// Optional pre-attention block, then the encoder stack. `x` is [L x D] for a
/// single sequence, or the rows of several sequences of length `seq_len`
/// stacked (attention never crosses sequence boundaries).
Tensor translinear_forward(const Tensor& x, const TransLinearParams& p, const TransLinearConfig& cfg,
                           std::span<const Mask> masks, std::size_t seq_len);

/// Local feature vector [1 x channels*pool_len] of one sequence [L x D]. Only
/// the first `length` positions belong to the sequence; masked positions are
/// excluded from pooling.
Tensor poscnn_forward(const Tensor& x, const PosCNNParams& p, const PosCNNConfig& cfg, std::span<const std::uint8_t> mask,
                      std::size_t length);

/// Logits [1 x n_classes] from a global [1 x D] and a local [1 x CP] feature.
Tensor classify(const Tensor& global_feat, const Tensor& local_feat, const HeadParams& p, const ClassifierHeadConfig& cfg);

/// The full classifier. Parameters are created from a seeded generator and
/// exposed in a fixed order under stable names.
class Model {
 public:
  Model(const ModelConfig& cfg, Rng& rng);

  const ModelConfig& config() const { return cfg_; }
  const std::vector<std::pair<std::string, Tensor>>& parameters() const { return params_; }
  std::size_t parameter_count() const;

  /// Logits [B x n_classes].
  Tensor forward(const PaddedBatch& batch) const;

 private:
  Tensor& add_param(std::string name, Tensor t);

  ModelConfig cfg_;
  std::vector<std::pair<std::string, Tensor>> params_;
  std::optional<BaseEmbeddingParams> base_;
  Tensor in_w_, in_b_;
  std::optional<TransLinearParams> translinear_;
  std::optional<PosCNNParams> poscnn_;
  HeadParams head_;
};

PDPP_NAMESPACE_END
