#include "firemap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "firemap/data.hpp"
#include "firemap/parallel.hpp"
#include "firemap/rng.hpp"

namespace firemap {

namespace {

void check_pair(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size())
    throw std::invalid_argument("metrics: labels and scores length mismatch");
  if (labels.empty()) throw std::invalid_argument("metrics: empty input");
  for (int y : labels)
    if (y != 0 && y != 1) throw std::invalid_argument("metrics: labels must be 0 or 1");
}

void check_prob_scores(std::span<const double> scores) {
  for (double s : scores)
    if (!(s >= 0.0 && s <= 1.0))
      throw std::invalid_argument("metrics: scores must lie in [0,1]");
}

std::size_t count_positives(std::span<const int> labels) {
  std::size_t pos = 0;
  for (int y : labels) pos += static_cast<std::size_t>(y);
  return pos;
}

// Indices sorted by score descending, ties by original index ascending.
std::vector<std::size_t> order_by_score_desc(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty set");
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::RocAuc: return "roc_auc";
    case MetricKind::PrAuc: return "pr_auc";
    case MetricKind::Brier: return "brier";
    case MetricKind::Accuracy: return "accuracy";
    case MetricKind::Precision: return "precision";
    case MetricKind::Recall: return "recall";
    case MetricKind::F1: return "f1";
  }
  return "unknown";
}

ConfusionMatrix confusion(std::span<const int> labels, std::span<const double> scores,
                          double threshold) {
  check_pair(labels, scores);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++cm.tp : ++cm.fn;
    } else {
      predicted ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

DerivedMetrics derived_metrics(const ConfusionMatrix& cm) {
  DerivedMetrics m;
  const double tp = static_cast<double>(cm.tp);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  const double tn = static_cast<double>(cm.tn);
  if (cm.total() > 0) m.accuracy = (tp + tn) / (tp + fp + fn + tn);
  if (cm.tp + cm.fp > 0) m.precision = tp / (tp + fp);
  if (cm.tp + cm.fn > 0) m.recall = tp / (tp + fn);
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0)
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  return m;
}

double roc_auc(std::span<const int> labels, std::span<const double> scores) {
  check_pair(labels, scores);
  const std::size_t n = labels.size();
  const std::size_t pos = count_positives(labels);
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("roc_auc: needs at least one positive and one negative");

  // Mann-Whitney via average ranks over score-sorted order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  return (rank_sum_pos - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1)) /
         (static_cast<double>(pos) * static_cast<double>(neg));
}

std::vector<RocPoint> roc_curve(std::span<const int> labels, std::span<const double> scores) {
  check_pair(labels, scores);
  const std::size_t pos = count_positives(labels);
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("roc_curve: needs at least one positive and one negative");

  const auto order = order_by_score_desc(scores);
  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == s) {
      labels[order[j]] == 1 ? ++tp : ++fp;
      ++j;
    }
    points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                      static_cast<double>(tp) / static_cast<double>(pos), s});
    i = j;
  }
  return points;
}

std::pair<std::vector<PrPoint>, double> pr_curve_and_auc(std::span<const int> labels,
                                                         std::span<const double> scores) {
  check_pair(labels, scores);
  const std::size_t pos = count_positives(labels);
  if (pos == 0) throw std::invalid_argument("pr_curve: needs at least one positive");

  const auto order = order_by_score_desc(scores);
  std::vector<PrPoint> points;
  double auc = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == s) {
      labels[order[j]] == 1 ? ++tp : ++fp;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    points.push_back({recall, precision, s});
    auc += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return {points, auc};
}

double brier(std::span<const int> labels, std::span<const double> scores) {
  check_pair(labels, scores);
  check_prob_scores(scores);
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double d = scores[i] - static_cast<double>(labels[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(labels.size());
}

ReliabilityBins reliability_bins(std::span<const int> labels, std::span<const double> scores,
                                 int n_bins) {
  check_pair(labels, scores);
  check_prob_scores(scores);
  if (n_bins < 2) throw std::invalid_argument("reliability_bins: n_bins must be >= 2");

  ReliabilityBins out;
  out.bins.resize(static_cast<std::size_t>(n_bins));
  std::vector<double> score_sum(n_bins, 0.0);
  std::vector<double> label_sum(n_bins, 0.0);
  for (int b = 0; b < n_bins; ++b) {
    out.bins[b].lo = static_cast<double>(b) / n_bins;
    out.bins[b].hi = static_cast<double>(b + 1) / n_bins;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int b = std::min(static_cast<int>(scores[i] * n_bins), n_bins - 1);
    ++out.bins[b].count;
    score_sum[b] += scores[i];
    label_sum[b] += labels[i];
  }
  for (int b = 0; b < n_bins; ++b) {
    if (out.bins[b].count > 0) {
      out.bins[b].mean_predicted = score_sum[b] / static_cast<double>(out.bins[b].count);
      out.bins[b].observed_frequency = label_sum[b] / static_cast<double>(out.bins[b].count);
    }
  }
  out.brier = brier(labels, scores);
  return out;
}

std::vector<double> default_topk_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 20.0);
  return grid;
}

std::vector<TopKPoint> topk_capture(std::span<const int> labels, std::span<const double> scores,
                                    std::span<const double> k_grid) {
  check_pair(labels, scores);
  const std::size_t pos = count_positives(labels);
  if (pos == 0) throw std::invalid_argument("topk_capture: no positives");
  for (double k : k_grid)
    if (!(k > 0.0 && k <= 1.0))
      throw std::invalid_argument("topk_capture: k fractions must lie in (0,1]");

  const auto order = order_by_score_desc(scores);
  std::vector<double> captured_prefix(order.size() + 1, 0.0);
  for (std::size_t i = 0; i < order.size(); ++i)
    captured_prefix[i + 1] = captured_prefix[i] + labels[order[i]];

  std::vector<TopKPoint> out;
  out.reserve(k_grid.size());
  const double n = static_cast<double>(labels.size());
  for (double k : k_grid) {
    const std::size_t take =
        std::min(static_cast<std::size_t>(std::ceil(k * n)), order.size());
    out.push_back({k, captured_prefix[take] / static_cast<double>(pos)});
  }
  return out;
}

std::optional<double> metric_value(MetricKind kind, std::span<const int> labels,
                                   std::span<const double> scores, double threshold) {
  const std::size_t pos = count_positives(labels);
  const std::size_t neg = labels.size() - pos;
  switch (kind) {
    case MetricKind::RocAuc:
      if (pos == 0 || neg == 0) return std::nullopt;
      return roc_auc(labels, scores);
    case MetricKind::PrAuc:
      if (pos == 0) return std::nullopt;
      return pr_curve_and_auc(labels, scores).second;
    case MetricKind::Brier:
      return brier(labels, scores);
    case MetricKind::Accuracy:
      return derived_metrics(confusion(labels, scores, threshold)).accuracy;
    case MetricKind::Precision:
      return derived_metrics(confusion(labels, scores, threshold)).precision;
    case MetricKind::Recall:
      return derived_metrics(confusion(labels, scores, threshold)).recall;
    case MetricKind::F1:
      return derived_metrics(confusion(labels, scores, threshold)).f1;
  }
  return std::nullopt;
}

BootstrapInterval bootstrap_ci(MetricKind kind, std::span<const int> labels,
                               std::span<const double> scores, int B, double level,
                               std::uint64_t seed, double threshold, int threads) {
  check_pair(labels, scores);
  if (B < 100) throw std::invalid_argument("bootstrap_ci: B must be >= 100");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("bootstrap_ci: level must lie in (0,1)");

  const auto point = metric_value(kind, labels, scores, threshold);
  if (!point)
    throw std::invalid_argument("bootstrap_ci: metric undefined on the full sample");

  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? pos_idx : neg_idx).push_back(i);

  const std::uint64_t root = derive_seed(seed, kStreamBootstrap);
  std::vector<double> values(static_cast<std::size_t>(B),
                             std::numeric_limits<double>::quiet_NaN());
  parallel_for(static_cast<std::size_t>(B), threads, [&](std::size_t b) {
    Rng rng(derive_seed(root, b));
    std::vector<int> y;
    std::vector<double> s;
    y.reserve(labels.size());
    s.reserve(labels.size());
    for (std::size_t k = 0; k < pos_idx.size(); ++k) {
      const std::size_t i = pos_idx[rng.uniform_below(pos_idx.size())];
      y.push_back(1);
      s.push_back(scores[i]);
    }
    for (std::size_t k = 0; k < neg_idx.size(); ++k) {
      const std::size_t i = neg_idx[rng.uniform_below(neg_idx.size())];
      y.push_back(0);
      s.push_back(scores[i]);
    }
    const auto v = metric_value(kind, y, s, threshold);
    if (v) values[b] = *v;
  });

  std::vector<double> defined;
  defined.reserve(values.size());
  int skipped = 0;
  for (double v : values) {
    if (std::isnan(v)) {
      ++skipped;
    } else {
      defined.push_back(v);
    }
  }
  if (defined.empty())
    throw std::runtime_error("bootstrap_ci: metric undefined on every resample");
  std::sort(defined.begin(), defined.end());

  BootstrapInterval out;
  out.point = *point;
  out.lo = quantile_sorted(defined, (1.0 - level) / 2.0);
  out.hi = quantile_sorted(defined, 1.0 - (1.0 - level) / 2.0);
  out.B = B;
  out.level = level;
  out.seed = seed;
  out.skipped = skipped;
  return out;
}

EvalReport evaluate(std::span<const int> labels, std::span<const double> scores,
                    const EvalOptions& options) {
  check_pair(labels, scores);
  check_prob_scores(scores);

  EvalReport report;
  report.n = labels.size();
  report.threshold = options.threshold;
  const std::size_t pos = count_positives(labels);
  const std::size_t neg = labels.size() - pos;
  report.positive_rate = static_cast<double>(pos) / static_cast<double>(labels.size());
  report.cm = confusion(labels, scores, options.threshold);
  report.derived = derived_metrics(report.cm);
  report.brier = brier(labels, scores);
  report.reliability = reliability_bins(labels, scores, options.n_bins);

  if (pos > 0 && neg > 0) {
    report.curves.roc = roc_curve(labels, scores);
    report.curves.roc_auc = roc_auc(labels, scores);
  }
  if (pos > 0) {
    auto [pr_points, ap] = pr_curve_and_auc(labels, scores);
    report.curves.pr = std::move(pr_points);
    report.curves.pr_auc = ap;
    report.topk = topk_capture(labels, scores, options.k_grid);
  }

  if (options.bootstrap_B > 0) {
    const MetricKind kinds[] = {MetricKind::RocAuc, MetricKind::PrAuc, MetricKind::Brier};
    for (MetricKind kind : kinds) {
      if (!metric_value(kind, labels, scores, options.threshold)) continue;
      report.intervals.emplace_back(
          std::string(metric_name(kind)),
          bootstrap_ci(kind, labels, scores, options.bootstrap_B, options.level, options.seed,
                       options.threshold, options.threads));
    }
  }
  return report;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : "undefined";
}

}  // namespace

std::string write_eval_report(const EvalReport& r) {
  std::string out = "firemap eval report 1\n";
  out += "n " + std::to_string(r.n) + "\n";
  out += "positive_rate " + format_double(r.positive_rate) + "\n";
  out += "threshold " + format_double(r.threshold) + "\n";
  out += "roc_auc " + opt_str(r.curves.roc_auc) + "\n";
  out += "pr_auc " + opt_str(r.curves.pr_auc) + "\n";
  out += "brier " + format_double(r.brier) + "\n";
  out += "accuracy " + opt_str(r.derived.accuracy) + "\n";
  out += "precision " + opt_str(r.derived.precision) + "\n";
  out += "recall " + opt_str(r.derived.recall) + "\n";
  out += "f1 " + opt_str(r.derived.f1) + "\n";
  out += "tp " + std::to_string(r.cm.tp) + "\n";
  out += "fp " + std::to_string(r.cm.fp) + "\n";
  out += "fn " + std::to_string(r.cm.fn) + "\n";
  out += "tn " + std::to_string(r.cm.tn) + "\n";

  out += "[roc]\nfpr,tpr,threshold\n";
  for (const auto& p : r.curves.roc)
    out += format_double(p.fpr) + "," + format_double(p.tpr) + "," + format_double(p.threshold) +
           "\n";
  out += "[pr]\nrecall,precision,threshold\n";
  for (const auto& p : r.curves.pr)
    out += format_double(p.recall) + "," + format_double(p.precision) + "," +
           format_double(p.threshold) + "\n";
  out += "[reliability]\nbin_lo,bin_hi,count,mean_predicted,observed_frequency\n";
  for (const auto& b : r.reliability.bins) {
    out += format_double(b.lo) + "," + format_double(b.hi) + "," + std::to_string(b.count) + ",";
    if (b.count > 0) {
      out += format_double(b.mean_predicted) + "," + format_double(b.observed_frequency);
    } else {
      out += "empty,empty";
    }
    out += "\n";
  }
  out += "[topk]\nk_fraction,captured_fraction\n";
  for (const auto& p : r.topk)
    out += format_double(p.k_fraction) + "," + format_double(p.captured_fraction) + "\n";
  out += "[bootstrap]\nmetric,point,lo,hi,B,level,skipped\n";
  for (const auto& [name, ci] : r.intervals)
    out += name + "," + format_double(ci.point) + "," + format_double(ci.lo) + "," +
           format_double(ci.hi) + "," + std::to_string(ci.B) + "," + format_double(ci.level) +
           "," + std::to_string(ci.skipped) + "\n";
  out += "[end]\n";
  return out;
}

}  // namespace firemap
