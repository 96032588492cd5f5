#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace firemap {

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
  std::int64_t total() const { return tp + fp + fn + tn; }
};

// Zero-denominator metrics come back disengaged rather than as NaN.
struct DerivedMetrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

struct CurveSet {
  std::vector<RocPoint> roc;
  std::vector<PrPoint> pr;
  std::optional<double> roc_auc;
  std::optional<double> pr_auc;
};

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  double mean_predicted = 0.0;     // meaningless when count == 0
  double observed_frequency = 0.0; // meaningless when count == 0
  std::int64_t count = 0;
};

struct ReliabilityBins {
  std::vector<ReliabilityBin> bins;
  double brier = 0.0;
};

struct TopKPoint {
  double k_fraction = 0.0;
  double captured_fraction = 0.0;
};

struct BootstrapInterval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int B = 0;
  double level = 0.0;
  std::uint64_t seed = 0;
  int skipped = 0;  // resamples on which the metric was undefined
};

enum class MetricKind { RocAuc, PrAuc, Brier, Accuracy, Precision, Recall, F1 };
std::string_view metric_name(MetricKind kind);

// Counts under "score >= threshold predicts positive".
ConfusionMatrix confusion(std::span<const int> labels, std::span<const double> scores,
                          double threshold);
DerivedMetrics derived_metrics(const ConfusionMatrix& cm);

// Tie-aware rank statistic: P(score_pos > score_neg) + 0.5 P(equal).
double roc_auc(std::span<const int> labels, std::span<const double> scores);
std::vector<RocPoint> roc_curve(std::span<const int> labels, std::span<const double> scores);

// Points at each distinct threshold descending; the area is average
// precision (step integration).
std::pair<std::vector<PrPoint>, double> pr_curve_and_auc(std::span<const int> labels,
                                                         std::span<const double> scores);

double brier(std::span<const int> labels, std::span<const double> scores);

// Equal-width bins; bin index = min(floor(score * n_bins), n_bins - 1).
ReliabilityBins reliability_bins(std::span<const int> labels, std::span<const double> scores,
                                 int n_bins);

// Fraction of all positives captured in the ceil(k * n) top-scored rows;
// ties break toward the lower original index.
std::vector<TopKPoint> topk_capture(std::span<const int> labels, std::span<const double> scores,
                                    std::span<const double> k_grid);
std::vector<double> default_topk_grid();  // 0.05, 0.10, ..., 1.00

std::optional<double> metric_value(MetricKind kind, std::span<const int> labels,
                                   std::span<const double> scores, double threshold = 0.5);

// Percentile interval over B stratified resamples (positives and negatives
// resampled separately, counts preserved).
BootstrapInterval bootstrap_ci(MetricKind kind, std::span<const int> labels,
                               std::span<const double> scores, int B, double level,
                               std::uint64_t seed, double threshold = 0.5, int threads = 1);

struct EvalOptions {
  double threshold = 0.5;
  int n_bins = 10;
  std::vector<double> k_grid = default_topk_grid();
  int bootstrap_B = 0;  // 0 disables bootstrap intervals
  double level = 0.95;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Everything computed from one test set's labels and scores.
struct EvalReport {
  std::size_t n = 0;
  double positive_rate = 0.0;
  double threshold = 0.5;
  ConfusionMatrix cm;
  DerivedMetrics derived;
  CurveSet curves;
  ReliabilityBins reliability;
  std::vector<TopKPoint> topk;
  double brier = 0.0;
  std::vector<std::pair<std::string, BootstrapInterval>> intervals;
};

EvalReport evaluate(std::span<const int> labels, std::span<const double> scores,
                    const EvalOptions& options);

// Key/value header plus delimited curve blocks; fixed field names.
std::string write_eval_report(const EvalReport& report);

}  // namespace firemap
