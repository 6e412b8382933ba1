#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdpp/checkpoint.hpp"
#include "pdpp/config.hpp"
#include "pdpp/dataset.hpp"
#include "pdpp/embedding_file.hpp"
#include "pdpp/metrics.hpp"
#include "pdpp/model.hpp"

PDPP_NAMESPACE_BEGIN

/// Adaptive moment estimation over a fixed parameter list.
class Adam {
 public:
  Adam(std::vector<Tensor> params, const OptimizerConfig& cfg);

  /// One update from the accumulated gradients, which are then cleared.
  void step();
  void zero_grad();

  std::uint64_t steps() const { return t_; }
  const std::vector<std::vector<Real>>& first_moments() const { return m_; }
  const std::vector<std::vector<Real>>& second_moments() const { return v_; }
  void restore(std::uint64_t steps, std::vector<std::vector<Real>> m, std::vector<std::vector<Real>> v);

 private:
  std::vector<Tensor> params_;
  OptimizerConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<Real>> m_, v_;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<metrics::ThresholdMetrics> val;

  /// Tab-separated: epoch, train_loss, val_acc, val_bacc, val_mcc.
  std::string format() const;
};

inline constexpr std::string_view kEpochLogHeader = "epoch\ttrain_loss\tval_acc\tval_bacc\tval_mcc";

struct TrainResult {
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  Checkpoint best;   // highest validation MCC (first on ties)
  Checkpoint last;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Trains from a fresh seeded model. Throws DivergenceError when a batch loss
/// is not finite.
TrainResult train(const RunConfig& cfg, const std::vector<SampleRecord>& train_set,
                  const std::vector<SampleRecord>& val_set, const EmbeddingFile& embeddings,
                  const EpochCallback& on_epoch = {});

std::vector<NamedArray> snapshot_parameters(const Model& model);
void restore_parameters(const Model& model, const std::vector<NamedArray>& arrays);

/// Checkpoint of a model (and optionally its optimizer).
Checkpoint make_checkpoint(const RunConfig& cfg, const Model& model, std::uint64_t epoch, const Rng& rng,
                           const Adam* optimizer = nullptr);

struct LoadedModel {
  RunConfig config;
  Model model;
};
LoadedModel load_model(const Checkpoint& c);

/// Positive-class probability per record, in input order.
std::vector<double> predict_probabilities(const Model& model, const std::vector<SampleRecord>& records,
                                          const EmbeddingFile& embeddings, std::size_t batch_size);

metrics::ScoredPredictions score_records(const Model& model, const std::vector<SampleRecord>& records,
                                         const EmbeddingFile& embeddings, std::size_t batch_size);

PDPP_NAMESPACE_END
