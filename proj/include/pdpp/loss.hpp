#pragma once

#include <span>

#include "pdpp/ops.hpp"
#include "pdpp/tensor.hpp"

PDPP_NAMESPACE_BEGIN

struct LossConfig {
  Real lambda = Real(0.95);
  Real beta = Real(1);
  std::size_t n_classes = 2;
  /// Plain cross-entropy: lambda taken as 1, both entropy terms dropped.
  bool plain_ce = false;

  void validate() const;
};

/// Class probabilities [N x K] (rows sum to 1) with one-hot labels [N x K].
struct BatchPredictions {
  Tensor probs;
  Tensor labels;

  /// Softmax of `logits` paired with one-hot encodings of `labels`.
  static BatchPredictions from_logits(const Tensor& logits, std::span<const int> labels);
  void validate() const;
};

/// -(1/N) sum_ik y_ik ln p_ik
Tensor cross_entropy(const BatchPredictions& b);
/// -sum_k q_k ln q_k with q the column mean of the probabilities.
Tensor marginal_entropy(const BatchPredictions& b);
/// -(1/N) sum_ik p_ik ln p_ik
Tensor conditional_entropy(const BatchPredictions& b);

struct LossTerms {
  double ce = 0, marginal = 0, conditional = 0, total = 0;
};

/// lambda * CE - H(Y) + beta * H(Y|X), or plain CE. `terms`, when given,
/// receives the constituent values.
Tensor tim_loss(const BatchPredictions& b, const LossConfig& cfg, LossTerms* terms = nullptr);

PDPP_NAMESPACE_END
