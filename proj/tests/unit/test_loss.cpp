#include <cmath>

#include "doctest.h"
#include "pdpp/errors.hpp"
#include "pdpp/loss.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace pdpp;
using doctest::Approx;

namespace {

BatchPredictions batch(std::vector<std::vector<Real>> probs, std::vector<int> labels) {
  BatchPredictions b;
  const std::size_t n = probs.size(), k = probs[0].size();
  b.probs = Tensor({n, k});
  b.labels = Tensor({n, k});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) b.probs.at(i, c) = probs[i][c];
    b.labels.at(i, static_cast<std::size_t>(labels[i])) = 1;
  }
  return b;
}

double value(const Tensor& t) { return t.item(); }

const double kLn2 = std::log(2.0);

}  // namespace

TEST_CASE("cross entropy examples") {
  CHECK(value(cross_entropy(batch({{0, 1}, {1, 0}}, {1, 0}))) == Approx(0.0));
  // Labels [1, 0] with p(positive) = 0.5 for both rows.
  CHECK(value(cross_entropy(batch({{0.5f, 0.5f}, {0.5f, 0.5f}}, {1, 0}))) == Approx(kLn2).epsilon(1e-6));
  const double clamped = value(cross_entropy(batch({{1, 0}}, {1})));
  CHECK(std::isfinite(clamped));
  CHECK(clamped == Approx(-std::log(1e-12)).epsilon(1e-4));
  CHECK(clamped == Approx(27.63).epsilon(1e-3));
}

TEST_CASE("marginal entropy examples") {
  CHECK(value(marginal_entropy(batch({{1, 0}, {1, 0}}, {0, 1}))) == Approx(0.0));
  CHECK(value(marginal_entropy(batch({{1, 0}, {0, 1}}, {0, 1}))) == Approx(kLn2).epsilon(1e-6));
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Real p = static_cast<Real>(rng.uniform()), q = static_cast<Real>(rng.uniform());
    const double h = value(marginal_entropy(batch({{p, 1 - p}, {q, 1 - q}}, {0, 1})));
    CHECK(h <= kLn2 + 1e-7);
    CHECK(h >= 0.0);
  }
}

TEST_CASE("conditional entropy examples") {
  CHECK(value(conditional_entropy(batch({{1, 0}, {0, 1}}, {0, 1}))) == Approx(0.0));
  CHECK(value(conditional_entropy(batch({{0.5f, 0.5f}, {0.5f, 0.5f}}, {0, 1}))) == Approx(kLn2).epsilon(1e-6));
  CHECK(value(conditional_entropy(batch({{0.99f, 0.01f}, {0.99f, 0.01f}}, {0, 1}))) == Approx(0.0560).epsilon(1e-3));
}

TEST_CASE("tim loss examples") {
  LossConfig cfg;
  cfg.lambda = Real(0.95);
  cfg.beta = 1;
  CHECK(std::abs(value(tim_loss(batch({{0.5f, 0.5f}, {0.5f, 0.5f}}, {1, 0}), cfg)) - 0.95 * kLn2) <= 1e-4);
  // Row 0 is labeled positive (index 1).
  CHECK(std::abs(value(tim_loss(batch({{0.01f, 0.99f}, {0.99f, 0.01f}}, {1, 0}), cfg)) - (-0.6276)) <= 1e-4);

  const BatchPredictions b = batch({{0.3f, 0.7f}, {0.8f, 0.2f}, {0.6f, 0.4f}}, {1, 1, 0});
  LossConfig plain = cfg;
  plain.plain_ce = true;
  CHECK(value(tim_loss(b, plain)) == Approx(value(cross_entropy(b))).epsilon(1e-7));
  LossConfig reduced = cfg;
  reduced.lambda = 1;
  reduced.beta = 0;
  CHECK(value(tim_loss(b, reduced)) + value(marginal_entropy(b)) == Approx(value(tim_loss(b, plain))).epsilon(1e-6));
}

TEST_CASE("tim loss decomposes into its terms") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(16);
    std::vector<int> labels(n);
    for (int& l : labels) l = static_cast<int>(rng.below(2));
    const BatchPredictions b = BatchPredictions::from_logits(testing::random_tensor({n, 2}, rng, -4, 4, false), labels);
    LossConfig cfg;
    cfg.lambda = static_cast<Real>(rng.uniform(0.9, 1.0));
    cfg.beta = static_cast<Real>(rng.uniform(0, 2));
    LossTerms terms;
    const double total = value(tim_loss(b, cfg, &terms));
    const double expect = cfg.lambda * value(cross_entropy(b)) - value(marginal_entropy(b)) + cfg.beta * value(conditional_entropy(b));
    CHECK(std::abs(total - expect) <= 1e-6);
    CHECK(terms.total == Approx(total));
    CHECK(terms.marginal >= 0);
    CHECK(terms.marginal <= kLn2 + 1e-6);
    CHECK(terms.conditional >= 0);
    CHECK(terms.conditional <= kLn2 + 1e-6);

    // Independent per-row oracle for the entropies.
    double cond = 0, q1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cond += oracle::entropy({b.probs.at(i, 0), b.probs.at(i, 1)});
      q1 += b.probs.at(i, 1);
    }
    CHECK(terms.conditional == Approx(cond / static_cast<double>(n)).epsilon(1e-5));
    CHECK(terms.marginal == Approx(oracle::entropy({1 - q1 / static_cast<double>(n), q1 / static_cast<double>(n)})).epsilon(1e-5));
  }
}

TEST_CASE("loss falls as the batch average moves toward uniform") {
  // Four rows, each (0.8, 0.2) or its mirror, labeled by their argmax: CE and
  // every row entropy stay fixed while the batch mean approaches (0.5, 0.5).
  const LossConfig cfg;
  const Real p = Real(0.8);
  std::vector<double> losses;
  for (int mirrored = 0; mirrored <= 2; ++mirrored) {
    std::vector<std::vector<Real>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 4; ++i) {
      rows.push_back(i < mirrored ? std::vector<Real>{1 - p, p} : std::vector<Real>{p, 1 - p});
      labels.push_back(i < mirrored ? 1 : 0);
    }
    losses.push_back(value(tim_loss(batch(rows, labels), cfg)));
  }
  CHECK(losses[0] > losses[1]);
  CHECK(losses[1] > losses[2]);
}

TEST_CASE("loss input validation") {
  CHECK_THROWS_AS(BatchPredictions::from_logits(Tensor({2, 2}), std::vector<int>{0, 2}), ContractError);
  CHECK_THROWS_AS(BatchPredictions::from_logits(Tensor({2, 2}), std::vector<int>{0}), ShapeError);
  LossConfig bad;
  bad.beta = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
