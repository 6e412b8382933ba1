#include "pdpp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "pdpp/errors.hpp"

namespace pdpp::metrics {

void ScoredPredictions::validate() const {
  if (scores.empty()) throw ContractError("no predictions");
  if (scores.size() != labels.size()) throw ContractError("scores and labels differ in length");
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw ContractError("score outside [0, 1]");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw ContractError("labels must be 0 or 1");
  }
}

std::size_t ScoredPredictions::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

ConfusionCounts confusion_at_threshold(const ScoredPredictions& s, double threshold) {
  s.validate();
  ConfusionCounts c;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    const bool predicted = s.scores[i] >= threshold;
    if (s.labels[i] == 1) {
      (predicted ? c.tp : c.fn) += 1;
    } else {
      (predicted ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

namespace {
double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace

ThresholdMetrics threshold_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw ContractError("threshold metrics need at least one sample");
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  ThresholdMetrics m;
  m.acc = (tp + tn) / (tp + tn + fp + fn);
  m.sn = ratio(tp, tp + fn);
  m.sp = ratio(tn, tn + fp);
  // One rounding from integer counts, so the hand example lands on 17/24.
  m.bacc = (tp + fn > 0.0 && tn + fp > 0.0) ? (tp * (tn + fp) + tn * (tp + fn)) / (2.0 * (tp + fn) * (tn + fp))
                                            : 0.5 * m.sn + 0.5 * m.sp;
  const double den = (tp + fn) * (tn + fp) * (tp + fp) * (tn + fn);
  m.mcc = den > 0.0 ? ((tp * tn) - (fn * fp)) / std::sqrt(den) : 0.0;
  return m;
}

namespace {

// Indices by descending score; equal scores keep input order.
std::vector<std::size_t> rank_descending(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

// Cumulative (fp, tp) after each group of tied scores.
struct Step {
  double threshold;
  std::uint64_t fp;
  std::uint64_t tp;
};

std::vector<Step> tie_grouped_steps(const ScoredPredictions& s) {
  const auto order = rank_descending(s.scores);
  std::vector<Step> steps;
  std::uint64_t fp = 0, tp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (s.labels[order[i]] == 1 ? tp : fp) += 1;
    const bool last_of_group = i + 1 == order.size() || s.scores[order[i + 1]] != s.scores[order[i]];
    if (last_of_group) steps.push_back({s.scores[order[i]], fp, tp});
  }
  return steps;
}

}  // namespace

double roc_auc(const ScoredPredictions& s) {
  s.validate();
  const std::uint64_t pos = s.positives(), neg = s.negatives();
  if (pos == 0 || neg == 0) throw UndefinedMetricError("ROC AUC needs both classes");
  // Twice the trapezoid area in integer units: each group adds
  // dfp * (tp_before + tp_after), i.e. correct pairs twice plus ties once.
  std::uint64_t twice_area = 0, fp_prev = 0, tp_prev = 0;
  for (const Step& st : tie_grouped_steps(s)) {
    twice_area += (st.fp - fp_prev) * (st.tp + tp_prev);
    fp_prev = st.fp;
    tp_prev = st.tp;
  }
  return static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double pr_auc(const ScoredPredictions& s) {
  s.validate();
  const std::size_t pos = s.positives();
  if (pos == 0) throw UndefinedMetricError("PR AUC needs at least one positive");
  const auto order = rank_descending(s.scores);
  double total = 0.0;
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (s.labels[order[rank]] != 1) continue;
    ++tp;
    total += static_cast<double>(tp) / static_cast<double>(rank + 1);
  }
  return total / static_cast<double>(pos);
}

std::vector<CurvePoint> roc_curve(const ScoredPredictions& s) {
  s.validate();
  const double pos = static_cast<double>(s.positives()), neg = static_cast<double>(s.negatives());
  std::vector<CurvePoint> out{{INFINITY, 0.0, 0.0}};
  for (const Step& st : tie_grouped_steps(s)) {
    out.push_back({st.threshold, neg > 0 ? st.fp / neg : 0.0, pos > 0 ? st.tp / pos : 0.0});
  }
  return out;
}

std::vector<CurvePoint> pr_curve(const ScoredPredictions& s) {
  s.validate();
  const double pos = static_cast<double>(s.positives());
  std::vector<CurvePoint> out;
  for (const Step& st : tie_grouped_steps(s)) {
    const double predicted = static_cast<double>(st.tp + st.fp);
    out.push_back({st.threshold, pos > 0 ? st.tp / pos : 0.0, st.tp / predicted});
  }
  return out;
}

namespace {
// Linear interpolation between order statistics, q in [0, 1].
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}
}  // namespace

CategoryStats describe(std::vector<double> values) {
  CategoryStats st;
  st.count = values.size();
  if (values.empty()) return st;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  st.mean = mean;
  // Sample standard deviation; a single value has spread 0.
  st.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  st.median = quantile(values, 0.5);
  st.q25 = quantile(values, 0.25);
  st.q75 = quantile(values, 0.75);
  return st;
}

PredictionDistribution prediction_distribution(const ScoredPredictions& s, double threshold) {
  s.validate();
  std::vector<double> tn, tp, fn, fp;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    const bool predicted = s.scores[i] >= threshold;
    if (s.labels[i] == 1) {
      (predicted ? tp : fn).push_back(s.scores[i]);
    } else {
      (predicted ? fp : tn).push_back(s.scores[i]);
    }
  }
  return {describe(std::move(tn)), describe(std::move(tp)), describe(std::move(fn)), describe(std::move(fp))};
}

MetricReport evaluate(const ScoredPredictions& s, double threshold) {
  MetricReport r;
  r.threshold = threshold;
  r.counts = confusion_at_threshold(s, threshold);
  r.values = threshold_metrics(r.counts);
  try {
    r.roc_auc = roc_auc(s);
  } catch (const UndefinedMetricError&) {
  }
  try {
    r.pr_auc = pr_auc(s);
  } catch (const UndefinedMetricError&) {
  }
  return r;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  // "-0.0000" would read as a sign where there is none.
  if (std::string_view(buf) == "-0.0000") return "0.0000";
  return buf;
}

namespace {
std::string opt4(const std::optional<double>& v) { return v ? fixed4(*v) : std::string("undefined"); }
}  // namespace

std::string format_report(const MetricReport& r) {
  std::string out;
  out += "# threshold " + fixed4(r.threshold) + "\n";
  out += "tp = " + std::to_string(r.counts.tp) + "\n";
  out += "fp = " + std::to_string(r.counts.fp) + "\n";
  out += "tn = " + std::to_string(r.counts.tn) + "\n";
  out += "fn = " + std::to_string(r.counts.fn) + "\n";
  out += "acc = " + fixed4(r.values.acc) + "\n";
  out += "bacc = " + fixed4(r.values.bacc) + "\n";
  out += "sn = " + fixed4(r.values.sn) + "\n";
  out += "sp = " + fixed4(r.values.sp) + "\n";
  out += "mcc = " + fixed4(r.values.mcc) + "\n";
  out += "roc_auc = " + opt4(r.roc_auc) + "\n";
  out += "pr_auc = " + opt4(r.pr_auc) + "\n";
  return out;
}

std::string format_distribution(const PredictionDistribution& d) {
  std::string out;
  auto emit = [&out](std::string_view name, const CategoryStats& st) {
    const std::string p(name);
    out += p + ".count = " + std::to_string(st.count) + "\n";
    out += p + ".mean = " + (st.mean ? fixed4(*st.mean) : "absent") + "\n";
    out += p + ".median = " + (st.median ? fixed4(*st.median) : "absent") + "\n";
    out += p + ".stddev = " + (st.stddev ? fixed4(*st.stddev) : "absent") + "\n";
    out += p + ".q25 = " + (st.q25 ? fixed4(*st.q25) : "absent") + "\n";
    out += p + ".q75 = " + (st.q75 ? fixed4(*st.q75) : "absent") + "\n";
  };
  emit("TN", d.tn);
  emit("TP", d.tp);
  emit("FN", d.fn);
  emit("FP", d.fp);
  return out;
}

std::string format_curve(const std::vector<CurvePoint>& points, std::string_view x_name, std::string_view y_name) {
  std::string out = std::string(x_name) + "\t" + std::string(y_name) + "\n";
  char buf[96];
  for (const CurvePoint& p : points) {
    std::snprintf(buf, sizeof buf, "%.6f\t%.6f\n", p.x, p.y);
    out += buf;
  }
  return out;
}

}  // namespace pdpp::metrics
