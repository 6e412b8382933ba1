#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdpp::metrics {

inline constexpr double kDefaultThreshold = 0.5;

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Positive-class probabilities with their binary labels.
struct ScoredPredictions {
  std::vector<double> scores;
  std::vector<int> labels;

  /// Throws ContractError unless the lists are non-empty, equally long,
  /// scores lie in [0, 1] and labels are 0/1.
  void validate() const;
  std::size_t positives() const;
  std::size_t negatives() const { return labels.size() - positives(); }
};

/// Predicted positive iff score >= threshold.
ConfusionCounts confusion_at_threshold(const ScoredPredictions& s, double threshold = kDefaultThreshold);

struct ThresholdMetrics {
  double acc = 0.0;
  double bacc = 0.0;
  double sn = 0.0;
  double sp = 0.0;
  double mcc = 0.0;
};

/// ACC, Sn, Sp, BACC = 0.5 Sn + 0.5 Sp and MCC. A zero denominator yields 0
/// (for Sn, Sp and MCC alike). Throws ContractError when the counts are empty.
ThresholdMetrics threshold_metrics(const ConfusionCounts& c);

/// Area under the ROC curve by trapezoids over tie-grouped thresholds; equal
/// to the probability that a random positive outscores a random negative,
/// ties counting one half. Throws UndefinedMetricError on single-class labels.
double roc_auc(const ScoredPredictions& s);

/// Average precision: mean over positives, in descending score order with
/// ties kept in input order, of precision at the positive's rank. Throws
/// UndefinedMetricError when there are no positives.
double pr_auc(const ScoredPredictions& s);

struct CurvePoint {
  double threshold;
  double x;
  double y;
};

/// (FPR, TPR) at every distinct score, from the highest threshold down,
/// starting at (0, 0).
std::vector<CurvePoint> roc_curve(const ScoredPredictions& s);
/// (recall, precision) at every distinct score, from the highest threshold down.
std::vector<CurvePoint> pr_curve(const ScoredPredictions& s);

struct CategoryStats {
  std::size_t count = 0;
  // Absent when count == 0.
  std::optional<double> mean, median, stddev, q25, q75;
};

/// Raw-score statistics of the TN, TP, FN and FP groups at a threshold.
struct PredictionDistribution {
  CategoryStats tn, tp, fn, fp;
};

CategoryStats describe(std::vector<double> values);
PredictionDistribution prediction_distribution(const ScoredPredictions& s, double threshold = kDefaultThreshold);

struct MetricReport {
  double threshold = kDefaultThreshold;
  ConfusionCounts counts;
  ThresholdMetrics values;
  std::optional<double> roc_auc;  // absent when undefined
  std::optional<double> pr_auc;
};

MetricReport evaluate(const ScoredPredictions& s, double threshold = kDefaultThreshold);

/// `key = value` lines, four decimals, "undefined" for absent AUCs.
std::string format_report(const MetricReport& r);
std::string format_distribution(const PredictionDistribution& d);
/// Two tab-separated columns with a header line.
std::string format_curve(const std::vector<CurvePoint>& points, std::string_view x_name, std::string_view y_name);

/// Fixed four-decimal rendering used by every report.
std::string fixed4(double v);

}  // namespace pdpp::metrics
