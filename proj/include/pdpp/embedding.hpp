#pragma once

#include <span>
#include <string_view>

#include "pdpp/ops.hpp"
#include "pdpp/rng.hpp"
#include "pdpp/tensor.hpp"
#include "pdpp/vocabulary.hpp"

PDPP_NAMESPACE_BEGIN

inline constexpr std::size_t kBaseEmbeddingDim = 128;

/// Learned residue embedding: a [22 x 128] table projected to the pretrained
/// width. The pad row of the table stays zero.
struct BaseEmbeddingParams {
  Tensor table;            // [22 x 128]
  Tensor projection;       // [128 x 1280]
  Tensor projection_bias;  // [1280]

  static BaseEmbeddingParams init(Rng& rng, std::size_t embed_dim = kBaseEmbeddingDim,
                                  std::size_t out_dim = kPretrainedDim);
};

struct FusionConfig {
  /// Weight of the pretrained embedding; 1 disables the learned embedding.
  Real alpha = Real(0.9);
  void validate() const;
};

/// Fused per-residue features of one sequence.
struct EmbeddedSequence {
  Tensor features;  // [L x 1280]
  std::size_t length = 0;
  Mask mask;  // 0 on pad positions
};

Mask pad_mask(std::span<const std::size_t> tokens);

/// Row t = projection_bias + table[tokens[t]] * projection; rows of pad tokens
/// are zero. Throws ContractError on out-of-range tokens.
Tensor base_embed(std::span<const std::size_t> tokens, const BaseEmbeddingParams& params);

/// alpha * pretrained + (1 - alpha) * base. Throws AlignmentError naming
/// `sequence_id` when the shapes disagree.
Tensor fuse_features(const Tensor& pretrained, const Tensor& base, Real alpha, std::string_view sequence_id = {});

EmbeddedSequence fuse(const Tensor& pretrained, const Tensor& base, std::span<const std::size_t> tokens,
                      const FusionConfig& cfg, std::string_view sequence_id = {});

PDPP_NAMESPACE_END
