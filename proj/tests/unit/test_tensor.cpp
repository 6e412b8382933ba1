#include <cmath>
#include <numeric>

#include "doctest.h"
#include "pdpp/errors.hpp"
#include "pdpp/ops.hpp"
#include "pdpp/rng.hpp"
#include "pdpp/tape.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace pdpp;
using doctest::Approx;

namespace {

Tensor row(std::initializer_list<Real> v) { return Tensor({1, v.size()}, std::vector<Real>(v)); }

Tensor kernel(std::initializer_list<Real> taps) { return Tensor({1, 1, taps.size()}, std::vector<Real>(taps)); }

void check_values(const Tensor& t, std::initializer_list<double> expected, double eps = 1e-6) {
  REQUIRE(t.numel() == expected.size());
  std::size_t i = 0;
  for (double e : expected) CHECK(t[i++] == Approx(e).epsilon(eps));
}

}  // namespace

TEST_CASE("tensor shape invariants") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK_FALSE(t.has_grad());
  CHECK(t.grad().size() == t.numel());
  CHECK_THROWS_AS(Tensor({2, 3}, std::vector<Real>(5)), ShapeError);
  CHECK_THROWS_AS(Tensor({2, 0}), ShapeError);

  Tensor alias = t;
  alias[0] = 7;
  CHECK(t[0] == 7);
  Tensor copy = t.clone();
  copy[0] = 1;
  CHECK(t[0] == 7);
}

TEST_CASE("matmul examples") {
  const Tensor a = Tensor::matrix({{1, 2}, {3, 4}});
  check_values(ops::matmul(a, Tensor::matrix({{1, 0}, {0, 1}})), {1, 2, 3, 4});
  check_values(ops::matmul(Tensor::matrix({{1, 0}}), Tensor::matrix({{5}, {7}})), {5});
  check_values(ops::matmul(a, Tensor::matrix({{1, 1}, {1, 1}})), {3, 3, 7, 7});
}

TEST_CASE("matmul agrees with a naive product in both kernel forms") {
  Rng rng(3);
  for (std::size_t k : {3u, 31u, 32u, 70u}) {
    const Tensor a = testing::random_tensor({5, k}, rng, -2, 2, false);
    const Tensor b = testing::random_tensor({k, 4}, rng, -2, 2, false);
    const std::vector<double> ad(a.data().begin(), a.data().end()), bd(b.data().begin(), b.data().end());
    const auto expect = oracle::matmul(ad, bd, 5, k, 4);
    const Tensor c = ops::matmul(a, b);
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(c[i] == Approx(expect[i]).epsilon(1e-5));
  }
}

TEST_CASE("matmul shape error names both shapes") {
  try {
    ops::matmul(Tensor({2, 3}), Tensor({2, 3}));
    FAIL("expected a shape error");
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    CHECK(what.find("[2x3]") != std::string::npos);
  }
}

TEST_CASE("conv1d_same examples") {
  const Tensor zero_bias = Tensor::vector({0});
  check_values(ops::conv1d_same(row({0, 0, 0}), kernel({0.3f, -2, 5}), zero_bias), {0, 0, 0});
  check_values(ops::conv1d_same(row({1, 2, 3}), kernel({1, 0, -1}), zero_bias), {-2, -2, 2});
  check_values(ops::conv1d_same(row({2.5f, 2.5f, 2.5f, 2.5f}), kernel({0, 1, 0}), zero_bias), {2.5, 2.5, 2.5, 2.5});
}

TEST_CASE("conv1d_same preserves length and matches the padded sum") {
  Rng rng(5);
  for (std::size_t len : {1u, 2u, 7u, 40u}) {
    const Tensor x = testing::random_tensor({3, len}, rng, -2, 2, false);
    const Tensor w = testing::random_tensor({2, 3, 3}, rng, -2, 2, false);
    const Tensor b = testing::random_tensor({2}, rng, -2, 2, false);
    const Tensor y = ops::conv1d_same(x, w, b);
    REQUIRE(y.shape() == Shape{2, len});
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < len; ++i) {
        double s = b[c];
        for (std::size_t ci = 0; ci < 3; ++ci) {
          for (std::size_t k = 0; k < 3; ++k) {
            const long p = static_cast<long>(i + k) - 1;
            if (p >= 0 && p < static_cast<long>(len)) s += w[(c * 3 + ci) * 3 + k] * x[ci * len + static_cast<std::size_t>(p)];
          }
        }
        CHECK(y.at(c, i) == Approx(s).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("softmax examples") {
  check_values(ops::softmax(row({0, 0})), {0.5, 0.5});
  check_values(ops::softmax(row({static_cast<Real>(std::log(2.0)), 0})), {2.0 / 3.0, 1.0 / 3.0});
  const Tensor big = ops::softmax(row({1000, 0}));
  CHECK(std::isfinite(big[0]));
  CHECK(big[0] == Approx(1.0));
  CHECK(big[1] == Approx(0.0));
  CHECK_THROWS_AS(ops::softmax(row({NAN, 0})), NumericError);
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor x = testing::random_tensor({4, 1 + rng.below(9)}, rng, -50, 50, false);
    const Tensor y = ops::softmax(x);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double s = 0;
      for (std::size_t c = 0; c < y.cols(); ++c) {
        CHECK(y.at(r, c) >= 0);
        s += y.at(r, c);
      }
      CHECK(std::abs(s - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("layer_norm examples") {
  const Tensor ones = Tensor::vector({1, 1, 1});
  const Tensor zeros = Tensor::vector({0, 0, 0});
  check_values(ops::layer_norm(row({4, 4, 4}), ones, zeros), {0, 0, 0});
  check_values(ops::layer_norm(row({1, -1}), Tensor::vector({1, 1}), Tensor::vector({0, 0})), {1, -1}, 1e-4);
  check_values(ops::layer_norm(row({3, -8, 0.5f}), zeros, Tensor::vector({2, 2, 2})), {2, 2, 2});
}

TEST_CASE("adaptive_avg_pool examples") {
  check_values(ops::adaptive_avg_pool(row({3, 3, 3, 3, 3}), 2), {3, 3});
  check_values(ops::adaptive_avg_pool(row({1, 2, 3, 4}), 2), {1.5, 3.5});
  check_values(ops::adaptive_avg_pool(row({1, 5, 2}), 3), {1, 5, 2});
  CHECK_THROWS_AS(ops::adaptive_avg_pool(row({1, 2}), 3), ContractError);
  CHECK_THROWS_AS(ops::adaptive_avg_pool(row({1, 2}), 0), ContractError);
}

TEST_CASE("adaptive_avg_pool bins cover every position once") {
  for (std::size_t len = 1; len <= 20; ++len) {
    for (std::size_t out = 1; out <= len; ++out) {
      Tensor x({1, len});
      std::iota(x.data().begin(), x.data().end(), Real{0});
      const Tensor y = ops::adaptive_avg_pool(x, out);
      for (std::size_t b = 0; b < out; ++b) {
        const std::size_t lo = b * len / out, hi = (b + 1) * len / out;
        CHECK(hi > lo);
        CHECK(y[b] == Approx((lo + hi - 1) / 2.0));
      }
    }
  }
}

TEST_CASE("masked pooling averages only live positions") {
  const std::vector<std::uint8_t> mask = {1, 0, 1, 1, 0, 0};
  check_values(ops::adaptive_avg_pool(row({2, 100, 4, 6, 100, 100}), 3, mask), {2, 5, 0});
}

TEST_CASE("backward examples") {
  Tensor x = Tensor::vector({1, 2}, true);
  Tape tape;
  Tensor loss;
  {
    Tape::Scope scope(tape);
    loss = ops::sum(ops::mul(x, x));
  }
  tape.backward(loss);
  check_values(Tensor({2}, std::vector<Real>(x.grad().begin(), x.grad().end())), {2, 4});

  Tensor a = Tensor::matrix({{1, -2, 3}}, true);
  const Tensor up = Tensor::matrix({{0.5f, -1, 2}});
  Tape t2;
  {
    Tape::Scope scope(t2);
    const Tensor eye = Tensor::matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    loss = ops::sum(ops::mul(ops::matmul(ops::matmul(a, eye), eye), up));
  }
  t2.backward(loss);
  check_values(Tensor({3}, std::vector<Real>(a.grad().begin(), a.grad().end())), {0.5, -1, 2});

  CHECK_THROWS_AS(t2.backward(a), ContractError);
}

TEST_CASE("backward twice accumulates double the gradient") {
  Rng rng(11);
  Tensor w = testing::random_tensor({3, 4}, rng);
  const Tensor x = testing::random_tensor({2, 3}, rng, -2, 2, false);
  Tape tape;
  Tensor loss;
  {
    Tape::Scope scope(tape);
    loss = ops::sum(ops::mul(ops::matmul(x, w), ops::matmul(x, w)));
  }
  tape.backward(loss);
  const std::vector<Real> once(w.grad().begin(), w.grad().end());
  tape.backward(loss);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(w.grad()[i] == Approx(2 * once[i]).epsilon(1e-6));
}

TEST_CASE("tape records inputs before their consumers") {
  Tensor a = Tensor::matrix({{1, 2}}, true);
  Tape tape;
  {
    Tape::Scope scope(tape);
    ops::sum(ops::relu(ops::scale(a, 2)));
  }
  REQUIRE(tape.size() == 3);
  for (std::size_t i = 1; i < tape.size(); ++i) CHECK(tape.node(i).inputs[0].id() == tape.node(i - 1).output.id());
}

TEST_CASE("operations are deterministic") {
  auto run = [] {
    Rng rng(42);
    const Tensor x = testing::random_tensor({6, 40}, rng, -2, 2, false);
    const Tensor w = testing::random_tensor({40, 8}, rng, -2, 2, false);
    return ops::softmax(ops::matmul(x, w));
  };
  const Tensor a = run(), b = run();
  CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}
