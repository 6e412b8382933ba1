#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "pdpp/batch.hpp"
#include "pdpp/bytes.hpp"
#include "pdpp/errors.hpp"
#include "pdpp/loss.hpp"
#include "pdpp/trainer.hpp"
#include "support/toy.hpp"

using namespace pdpp;
using doctest::Approx;

namespace {

const testing::ToyData& toy() {
  static const testing::ToyData data = testing::toy_data(24, 12, 4, 31);
  return data;
}

std::vector<std::string> log_lines(const TrainResult& r) {
  std::vector<std::string> out;
  for (const auto& e : r.log) out.push_back(e.format());
  return out;
}

}  // namespace

TEST_CASE("config text round trip") {
  RunConfig cfg = testing::toy_config();
  cfg.loss.lambda = Real(0.93);
  cfg.optim.lr = 3.5e-4;
  cfg.model.poscnn.use_positional_encoding = false;
  cfg.threshold = 0.4;
  const RunConfig back = parse_config(to_text(cfg));
  CHECK(to_text(back) == to_text(cfg));
  CHECK(changed_fields(cfg, back).empty());
  CHECK(to_text(cfg).find("loss.lambda = 0.93\n") != std::string::npos);
}

TEST_CASE("config parsing errors") {
  CHECK_THROWS_AS(parse_config("loss.gamma = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("loss.lambda = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("optim.epochs = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("model.use_poscnn = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = 1\nseed = 2\n"), ConfigError);
  CHECK(parse_config("# comment\n\nseed = 7 # trailing\n").seed == 7);
  RunConfig bad = testing::toy_config();
  bad.model.translinear.n_heads = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("each ablation changes exactly its field") {
  const RunConfig base = testing::toy_config();
  for (std::string_view name : kAblationNames) {
    RunConfig cfg = base;
    apply_ablation(cfg, name);
    CHECK(changed_fields(base, cfg) == std::vector<std::string>{std::string(ablation_field(name))});
  }
  RunConfig cfg = base;
  CHECK_THROWS_AS(apply_ablation(cfg, "no_everything"), ConfigError);
}

TEST_CASE("checkpoint encoding") {
  Checkpoint c;
  c.config_text = "seed = 1\n";
  c.epoch = 3;
  c.rng_state = "1 2 3";
  c.parameters = {{"a", {2, 2}, {1, 2, 3, -0.0f}}, {"b", {3}, {0.5f, 0, 1e-30f}}};
  c.optimizer_step = 9;
  c.first_moments = {{0, 0, 0, 1}, {1, 1, 1}};
  c.second_moments = {{2, 2, 2, 2}, {3, 3, 3}};
  const auto bytes = encode_checkpoint(c);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "PDPPCKPT");
  const Checkpoint back = decode_checkpoint(bytes);
  CHECK(back == c);
  CHECK(encode_checkpoint(back) == bytes);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(bad), DataError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(decode_checkpoint(bad), DataError);
  bad = bytes;
  bad.push_back(1);
  CHECK_THROWS_AS(decode_checkpoint(bad), DataError);
  bad = bytes;
  bad[8] = 9;
  CHECK_THROWS_AS(decode_checkpoint(bad), DataError);
}

TEST_CASE("training is deterministic and checkpoints reload") {
  RunConfig cfg = testing::toy_config();
  cfg.optim.epochs = 3;
  const auto& d = toy();
  const std::vector<SampleRecord> val(d.records.begin(), d.records.begin() + 8);
  const TrainResult a = train(cfg, d.records, val, d.embeddings);
  const TrainResult b = train(cfg, d.records, val, d.embeddings);
  CHECK(log_lines(a) == log_lines(b));
  CHECK(encode_checkpoint(a.last) == encode_checkpoint(b.last));
  CHECK(a.log.size() == 3);
  CHECK(a.last.epoch == 3);
  CHECK(a.best_epoch >= 1);

  const auto dir = std::filesystem::temp_directory_path() / "pdpp_unit_ckpt";
  std::filesystem::create_directories(dir);
  save_checkpoint(dir / "m.ckpt", a.last);
  const Checkpoint loaded = load_checkpoint(dir / "m.ckpt");
  save_checkpoint(dir / "again.ckpt", loaded);
  CHECK(read_file_bytes(dir / "m.ckpt") == read_file_bytes(dir / "again.ckpt"));
  std::filesystem::remove_all(dir);

  // Evaluating with the reloaded weights reproduces the last logged validation metrics.
  const LoadedModel lm = load_model(loaded);
  const auto scored = score_records(lm.model, val, d.embeddings, 5);
  const auto m = metrics::threshold_metrics(metrics::confusion_at_threshold(scored, cfg.threshold));
  CHECK(std::abs(m.acc - a.log.back().val->acc) <= 1e-6);
  CHECK(std::abs(m.mcc - a.log.back().val->mcc) <= 1e-6);
}

TEST_CASE("plain_ce logs plain cross-entropy") {
  RunConfig cfg = testing::toy_config();
  apply_ablation(cfg, "plain_ce");
  const auto& d = toy();
  cfg.optim.batch_size = d.records.size();
  const TrainResult r = train(cfg, d.records, {}, d.embeddings);

  // One full batch per epoch: the logged loss is evaluated before the update.
  Rng rng(cfg.seed);
  const Model fresh(cfg.model, rng);
  const PaddedBatch batch = pad_batch(d.records, d.embeddings);
  const double ce = cross_entropy(BatchPredictions::from_logits(fresh.forward(batch), batch.labels)).item();
  CHECK(std::abs(r.log[0].train_loss - ce) <= 1e-6);
  CHECK_FALSE(r.log[0].val.has_value());
  CHECK(r.log[0].format().find("\t-\t-\t-") != std::string::npos);
}

TEST_CASE("prediction is independent of batching") {
  const auto& d = toy();
  RunConfig cfg = testing::toy_config();
  Rng rng(cfg.seed);
  const Model model(cfg.model, rng);
  const auto one = predict_probabilities(model, d.records, d.embeddings, 1);
  const auto seven = predict_probabilities(model, d.records, d.embeddings, 7);
  REQUIRE(one.size() == d.records.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(std::abs(one[i] - seven[i]) <= 1e-5);
    CHECK(one[i] >= 0);
    CHECK(one[i] <= 1);
  }
}

TEST_CASE("non-finite training aborts naming the step") {
  testing::ToyData d = testing::toy_data(8, 4, 4, 2);
  EmbeddingFile poisoned;
  for (EmbeddingRecord r : d.embeddings.records()) {
    if (r.id == d.records[5].id) r.values[3] = std::nanf("");
    poisoned.add(std::move(r));
  }
  RunConfig cfg = testing::toy_config();
  try {
    train(cfg, d.records, {}, poisoned);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() >= 1);
    CHECK(e.step() <= 2);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("early stopping on patience") {
  RunConfig cfg = testing::toy_config();
  cfg.optim.epochs = 40;
  cfg.optim.patience = 1;
  const auto& d = toy();
  const TrainResult r = train(cfg, d.records, d.records, d.embeddings);
  CHECK(r.log.size() < 40);
  CHECK(r.last.epoch == r.log.size());
  CHECK(r.best_epoch + 1 == r.log.size());
}

TEST_CASE("restore rejects mismatched parameters") {
  RunConfig cfg = testing::toy_config();
  Rng rng(1);
  const Model model(cfg.model, rng);
  auto arrays = snapshot_parameters(model);
  arrays[0].name = "other";
  CHECK_THROWS_AS(restore_parameters(model, arrays), DataError);
  arrays = snapshot_parameters(model);
  arrays.pop_back();
  CHECK_THROWS_AS(restore_parameters(model, arrays), DataError);
}
