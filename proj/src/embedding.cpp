#include "pdpp/embedding.hpp"

#include <cmath>
#include <string>

#include "pdpp/errors.hpp"
#include "pdpp/init.hpp"

PDPP_NAMESPACE_BEGIN

Tensor fan_in_uniform(Shape shape, std::size_t fan_in, Rng& rng) {
  Tensor t(std::move(shape), true);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (Real& v : t.data()) v = static_cast<Real>(rng.uniform(-bound, bound));
  return t;
}

Tensor filled_parameter(Shape shape, Real value) {
  Tensor t(std::move(shape), true);
  for (Real& v : t.data()) v = value;
  return t;
}

Tensor identity_parameter(std::size_t n) {
  Tensor t({n, n}, true);
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = Real{1};
  return t;
}

BaseEmbeddingParams BaseEmbeddingParams::init(Rng& rng, std::size_t embed_dim, std::size_t out_dim) {
  BaseEmbeddingParams p;
  p.table = fan_in_uniform({kVocabularySize, embed_dim}, 1, rng);
  for (std::size_t j = 0; j < embed_dim; ++j) p.table.at(kPadToken, j) = Real{0};
  p.projection = fan_in_uniform({embed_dim, out_dim}, embed_dim, rng);
  p.projection_bias = filled_parameter({out_dim}, Real{0});
  return p;
}

void FusionConfig::validate() const {
  if (!(alpha >= Real{0} && alpha <= Real{1})) {
    throw ConfigError("fusion.alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

Mask pad_mask(std::span<const std::size_t> tokens) {
  Mask m(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) m[i] = tokens[i] != kPadToken;
  return m;
}

Tensor base_embed(std::span<const std::size_t> tokens, const BaseEmbeddingParams& params) {
  if (tokens.empty()) throw ContractError("base_embed: empty token list");
  for (std::size_t t : tokens) {
    if (t >= params.table.rows()) throw ContractError("base_embed: token " + std::to_string(t) + " out of range");
  }
  // Project the whole vocabulary once, then pick rows: identical values to
  // projecting each gathered row, at a fraction of the cost for long inputs.
  const Tensor projected = ops::add_bias(ops::matmul(params.table, params.projection), params.projection_bias);
  const Tensor rows = ops::gather_rows(projected, tokens);
  return ops::mask_rows(rows, pad_mask(tokens));
}

Tensor fuse_features(const Tensor& pretrained, const Tensor& base, Real alpha, std::string_view sequence_id) {
  if (pretrained.shape() != base.shape()) {
    throw AlignmentError("sequence '" + std::string(sequence_id) + "': pretrained embedding " +
                         shape_string(pretrained.shape()) + " does not align with " + shape_string(base.shape()));
  }
  return ops::add(ops::scale(pretrained, alpha), ops::scale(base, Real{1} - alpha));
}

EmbeddedSequence fuse(const Tensor& pretrained, const Tensor& base, std::span<const std::size_t> tokens,
                      const FusionConfig& cfg, std::string_view sequence_id) {
  cfg.validate();
  if (pretrained.rank() != 2 || pretrained.rows() != tokens.size()) {
    throw AlignmentError("sequence '" + std::string(sequence_id) + "': pretrained embedding has " +
                         (pretrained.rank() == 2 ? std::to_string(pretrained.rows()) : std::string("?")) +
                         " rows for " + std::to_string(tokens.size()) + " residues");
  }
  EmbeddedSequence out;
  out.features = fuse_features(pretrained, base, cfg.alpha, sequence_id);
  out.length = tokens.size();
  out.mask = pad_mask(tokens);
  return out;
}

PDPP_NAMESPACE_END
