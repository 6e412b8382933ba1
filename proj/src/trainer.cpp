#include "pdpp/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "pdpp/batch.hpp"
#include "pdpp/errors.hpp"
#include "pdpp/loss.hpp"
#include "pdpp/tape.hpp"

PDPP_NAMESPACE_BEGIN

Adam::Adam(std::vector<Tensor> params, const OptimizerConfig& cfg) : params_(std::move(params)), cfg_(cfg) {
  for (const Tensor& p : params_) {
    m_.emplace_back(p.numel(), Real{0});
    v_.emplace_back(p.numel(), Real{0});
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    const auto g = p.grad();
    auto w = p.data();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = g[j];
      const double mj = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * gj;
      const double vj = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * gj * gj;
      m[j] = static_cast<Real>(mj);
      v[j] = static_cast<Real>(vj);
      w[j] = static_cast<Real>(w[j] - cfg_.lr * (mj / c1) / (std::sqrt(vj / c2) + cfg_.eps));
    }
  }
  zero_grad();
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

void Adam::restore(std::uint64_t steps, std::vector<std::vector<Real>> m, std::vector<std::vector<Real>> v) {
  if (m.size() != params_.size() || v.size() != params_.size()) throw DataError("optimizer state does not match the model");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (m[i].size() != params_[i].numel() || v[i].size() != params_[i].numel()) {
      throw DataError("optimizer state does not match the model");
    }
  }
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

std::string EpochLog::format() const {
  char buf[160];
  if (val) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\t%.6f\t%.6f", epoch, train_loss, val->acc, val->bacc, val->mcc);
  } else {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t-\t-\t-", epoch, train_loss);
  }
  return buf;
}

std::vector<NamedArray> snapshot_parameters(const Model& model) {
  std::vector<NamedArray> out;
  for (const auto& [name, t] : model.parameters()) {
    NamedArray a;
    a.name = name;
    for (std::size_t d : t.shape()) a.shape.push_back(static_cast<std::uint32_t>(d));
    a.values.assign(t.data().begin(), t.data().end());
    out.push_back(std::move(a));
  }
  return out;
}

void restore_parameters(const Model& model, const std::vector<NamedArray>& arrays) {
  const auto& params = model.parameters();
  if (arrays.size() != params.size()) {
    throw DataError("checkpoint holds " + std::to_string(arrays.size()) + " parameters, model expects " +
                    std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, t] = params[i];
    const NamedArray& a = arrays[i];
    Shape shape(a.shape.begin(), a.shape.end());
    if (a.name != name || shape != t.shape()) {
      throw DataError("checkpoint parameter '" + a.name + "' " + shape_string(shape) + " does not match model parameter '" +
                      name + "' " + shape_string(t.shape()));
    }
    Tensor target = t;
    std::copy(a.values.begin(), a.values.end(), target.data().begin());
  }
}

namespace {

std::vector<Tensor> parameter_tensors(const Model& model) {
  std::vector<Tensor> out;
  for (const auto& [name, t] : model.parameters()) out.push_back(t);
  return out;
}

std::vector<std::vector<float>> to_float(const std::vector<std::vector<Real>>& v) {
  std::vector<std::vector<float>> out;
  for (const auto& row : v) out.emplace_back(row.begin(), row.end());
  return out;
}

}  // namespace

Checkpoint make_checkpoint(const RunConfig& cfg, const Model& model, std::uint64_t epoch, const Rng& rng,
                           const Adam* optimizer) {
  Checkpoint c;
  c.config_text = to_text(cfg);
  c.epoch = epoch;
  c.rng_state = rng.state();
  c.parameters = snapshot_parameters(model);
  if (optimizer != nullptr) {
    c.optimizer_step = optimizer->steps();
    c.first_moments = to_float(optimizer->first_moments());
    c.second_moments = to_float(optimizer->second_moments());
  }
  return c;
}

LoadedModel load_model(const Checkpoint& c) {
  RunConfig cfg = parse_config(c.config_text);
  cfg.validate();
  Rng rng(cfg.seed);
  LoadedModel out{cfg, Model(cfg.model, rng)};
  restore_parameters(out.model, c.parameters);
  return out;
}

std::vector<double> predict_probabilities(const Model& model, const std::vector<SampleRecord>& records,
                                          const EmbeddingFile& embeddings, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<double> probs;
  probs.reserve(records.size());
  const std::span<const SampleRecord> all(records);
  for (std::size_t begin = 0; begin < records.size(); begin += batch_size) {
    const auto chunk = all.subspan(begin, std::min(batch_size, records.size() - begin));
    const PaddedBatch batch = pad_batch(chunk, embeddings);
    const Tensor p = ops::softmax(model.forward(batch));
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const double v = p.at(i, 1);
      if (!std::isfinite(v)) throw NumericError("non-finite prediction for '" + chunk[i].id + "'");
      probs.push_back(v);
    }
  }
  return probs;
}

metrics::ScoredPredictions score_records(const Model& model, const std::vector<SampleRecord>& records,
                                         const EmbeddingFile& embeddings, std::size_t batch_size) {
  metrics::ScoredPredictions s;
  s.scores = predict_probabilities(model, records, embeddings, batch_size);
  for (const SampleRecord& r : records) {
    if (r.label != 0 && r.label != 1) throw DataError("record '" + r.id + "' has no label");
    s.labels.push_back(r.label);
  }
  return s;
}

TrainResult train(const RunConfig& cfg, const std::vector<SampleRecord>& train_set,
                  const std::vector<SampleRecord>& val_set, const EmbeddingFile& embeddings, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw DataError("empty training set");
  for (const SampleRecord& r : train_set) {
    if (r.label != 0 && r.label != 1) throw DataError("training record '" + r.id + "' has no label");
  }

  Rng rng(cfg.seed);
  Model model(cfg.model, rng);
  Adam adam(parameter_tensors(model), cfg.optim);

  TrainResult result;
  std::optional<double> best_mcc;
  std::size_t since_best = 0;
  std::size_t step = 0;
  std::vector<std::size_t> order(train_set.size());

  for (std::size_t epoch = 1; epoch <= cfg.optim.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.optim.batch_size) {
      const std::size_t n = std::min(cfg.optim.batch_size, order.size() - begin);
      std::vector<SampleRecord> chunk;
      chunk.reserve(n);
      for (std::size_t i = 0; i < n; ++i) chunk.push_back(train_set[order[begin + i]]);
      const PaddedBatch batch = pad_batch(chunk, embeddings);

      ++step;
      const std::string where = "step " + std::to_string(step) + " (epoch " + std::to_string(epoch) + ")";
      Tape tape;
      Tensor loss;
      try {
        Tape::Scope scope(tape);
        const BatchPredictions preds = BatchPredictions::from_logits(model.forward(batch), batch.labels);
        loss = tim_loss(preds, cfg.loss);
      } catch (const DivergenceError&) {
        throw;
      } catch (const NumericError& e) {
        throw DivergenceError(std::string(e.what()) + " at " + where, step);
      }
      const double value = loss.item();
      if (!std::isfinite(value)) throw DivergenceError("loss is not finite at " + where, step);
      tape.backward(loss);
      adam.step();
      loss_sum += value * static_cast<double>(n);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(train_set.size());
    if (!val_set.empty()) {
      const auto scored = score_records(model, val_set, embeddings, cfg.optim.batch_size);
      entry.val = metrics::threshold_metrics(metrics::confusion_at_threshold(scored, cfg.threshold));
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    const bool improved = !entry.val || !best_mcc || entry.val->mcc > *best_mcc;
    if (improved) {
      if (entry.val) best_mcc = entry.val->mcc;
      result.best = make_checkpoint(cfg, model, epoch, rng, &adam);
      result.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (epoch == cfg.optim.epochs || (cfg.optim.patience > 0 && since_best >= cfg.optim.patience)) {
      result.last = make_checkpoint(cfg, model, epoch, rng, &adam);
      break;
    }
  }
  return result;
}

PDPP_NAMESPACE_END
