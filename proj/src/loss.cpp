#include "pdpp/loss.hpp"

#include <cmath>
#include <string>

#include "pdpp/errors.hpp"

PDPP_NAMESPACE_BEGIN

void LossConfig::validate() const {
  if (!std::isfinite(lambda)) throw ConfigError("loss.lambda must be finite");
  if (!(beta >= Real{0}) || !std::isfinite(beta)) throw ConfigError("loss.beta must be non-negative");
  if (n_classes < 2) throw ConfigError("loss.n_classes must be at least 2");
}

BatchPredictions BatchPredictions::from_logits(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.rows() != labels.size()) throw ShapeError("from_logits: one label per logit row required");
  const std::size_t k = logits.cols();
  Tensor onehot({labels.size(), k});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) {
      throw ContractError("from_logits: label " + std::to_string(labels[i]) + " outside [0, " + std::to_string(k) + ")");
    }
    onehot.at(i, static_cast<std::size_t>(labels[i])) = Real{1};
  }
  return {ops::softmax(logits), onehot};
}

void BatchPredictions::validate() const {
  if (!probs.defined() || probs.rank() != 2) throw ContractError("loss: probabilities must be [N x K]");
  if (probs.rows() == 0) throw ContractError("loss: empty batch");
  if (labels.defined() && labels.shape() != probs.shape()) {
    throw ShapeError("loss: labels " + shape_string(labels.shape()) + " do not match probabilities " +
                     shape_string(probs.shape()));
  }
}

namespace {

void require_labels(const BatchPredictions& b) {
  b.validate();
  if (!b.labels.defined()) throw ContractError("cross_entropy: labels required");
}

}  // namespace

Tensor cross_entropy(const BatchPredictions& b) {
  require_labels(b);
  const Real n = static_cast<Real>(b.probs.rows());
  return ops::scale(ops::sum(ops::mul(b.labels, ops::log_clamped(b.probs))), Real{-1} / n);
}

Tensor marginal_entropy(const BatchPredictions& b) {
  b.validate();
  const Tensor mean = ops::mean_rows(b.probs);
  return ops::scale(ops::sum(ops::mul(mean, ops::log_clamped(mean))), Real{-1});
}

Tensor conditional_entropy(const BatchPredictions& b) {
  b.validate();
  const Real n = static_cast<Real>(b.probs.rows());
  return ops::scale(ops::sum(ops::mul(b.probs, ops::log_clamped(b.probs))), Real{-1} / n);
}

Tensor tim_loss(const BatchPredictions& b, const LossConfig& cfg, LossTerms* terms) {
  cfg.validate();
  const Tensor ce = cross_entropy(b);
  if (cfg.plain_ce) {
    if (terms != nullptr) *terms = {ce.item(), 0.0, 0.0, ce.item()};
    return ce;
  }
  const Tensor hy = marginal_entropy(b);
  const Tensor hyx = conditional_entropy(b);
  Tensor total = ops::add(ops::add(ops::scale(ce, cfg.lambda), ops::scale(hy, Real{-1})), ops::scale(hyx, cfg.beta));
  if (terms != nullptr) *terms = {ce.item(), hy.item(), hyx.item(), total.item()};
  return total;
}

PDPP_NAMESPACE_END
