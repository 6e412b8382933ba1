#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <cmath>
#include <cstddef>
#include <vector>

namespace pdpp::oracle {

/// P(score_pos > score_neg) over all pairs, ties counting 1/2.
inline double pair_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

/// Naive row-major matrix product.
inline std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, std::size_t m, std::size_t k,
                                  std::size_t n) {
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t p = 0; p < k; ++p) out[i * n + j] += a[i * k + p] * b[p * n + j];
    }
  }
  return out;
}

/// -sum p ln p over one distribution.
inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h -= v * std::log(std::max(v, 1e-12));
  return h;
}

}  // namespace pdpp::oracle
