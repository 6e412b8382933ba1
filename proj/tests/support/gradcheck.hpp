#pragma once

// Central finite-difference oracle for tape gradients. Header-only so it
// compiles against whichever real type the including file selects.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pdpp/rng.hpp"
#include "pdpp/tape.hpp"
#include "pdpp/tensor.hpp"

PDPP_NAMESPACE_BEGIN
namespace testing {

struct GradCheckOptions {
  double step = 1e-3;
  // Tensors with more entries are checked on a random sample of this size.
  std::size_t max_entries = 1u << 30;
  // Random directional-derivative checks per tensor (covers every entry).
  std::size_t directions = 0;
  double floor = 1e-6;
  std::uint64_t seed = 1;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

inline double rel_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Compares the tape gradient of `loss()` with respect to each named tensor
/// against central differences.
inline GradCheckResult grad_check(const std::function<Tensor()>& loss,
                                  const std::vector<std::pair<std::string, Tensor>>& params,
                                  const GradCheckOptions& opt = {}) {
  for (const auto& [name, t] : params) {
    Tensor p = t;
    p.zero_grad();
  }
  {
    Tape tape;
    Tensor l;
    {
      Tape::Scope scope(tape);
      l = loss();
    }
    tape.backward(l);
  }
  auto eval = [&]() { return static_cast<double>(loss().item()); };

  GradCheckResult res;
  auto note = [&](double a, double n, const std::string& where) {
    const double e = rel_error(a, n, opt.floor);
    ++res.checked;
    if (e > res.max_rel_error || res.worst.empty()) {
      if (e >= res.max_rel_error) {
        res.max_rel_error = e;
        res.worst = where + " analytic " + std::to_string(a) + " numeric " + std::to_string(n);
      }
    }
  };

  Rng rng(opt.seed);
  for (const auto& [name, t] : params) {
    Tensor p = t;
    const std::vector<Real> analytic(p.grad().begin(), p.grad().end());
    const std::size_t n = p.numel();

    std::vector<std::size_t> entries;
    if (n <= opt.max_entries) {
      for (std::size_t i = 0; i < n; ++i) entries.push_back(i);
    } else {
      for (std::size_t k = 0; k < opt.max_entries; ++k) entries.push_back(static_cast<std::size_t>(rng.below(n)));
    }
    for (std::size_t i : entries) {
      const Real saved = p[i];
      p[i] = static_cast<Real>(saved + opt.step);
      const double up = eval();
      p[i] = static_cast<Real>(saved - opt.step);
      const double down = eval();
      p[i] = saved;
      note(analytic[i], (up - down) / (2.0 * opt.step), name + "[" + std::to_string(i) + "]");
    }

    for (std::size_t k = 0; k < opt.directions; ++k) {
      std::vector<double> dir(n);
      double norm = 0.0;
      for (double& d : dir) {
        d = rng.uniform(-1.0, 1.0);
        norm += d * d;
      }
      norm = std::sqrt(norm);
      double a = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dir[i] /= norm;
        a += analytic[i] * dir[i];
      }
      const std::vector<Real> saved(p.data().begin(), p.data().end());
      for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<Real>(saved[i] + opt.step * dir[i]);
      const double up = eval();
      for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<Real>(saved[i] - opt.step * dir[i]);
      const double down = eval();
      std::copy(saved.begin(), saved.end(), p.data().begin());
      note(a, (up - down) / (2.0 * opt.step), name + " direction " + std::to_string(k));
    }
  }
  return res;
}

/// Tensor with entries uniform in [lo, hi].
inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -2.0, double hi = 2.0, bool requires_grad = true) {
  Tensor t(std::move(shape), requires_grad);
  for (Real& v : t.data()) v = static_cast<Real>(rng.uniform(lo, hi));
  return t;
}

}  // namespace testing
PDPP_NAMESPACE_END
