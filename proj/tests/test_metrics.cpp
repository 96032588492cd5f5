#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "firemap/metrics.hpp"
#include "firemap/rng.hpp"

using namespace firemap;

namespace {

// O(n^2) pairwise oracle with half credit for ties.
double auc_oracle(std::span<const int> labels, std::span<const double> scores) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// Step enumeration over distinct thresholds descending.
double ap_oracle(std::span<const int> labels, std::span<const double> scores) {
  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  double total_pos = 0.0;
  for (int y : labels) total_pos += y;
  double ap = 0.0, prev_recall = 0.0;
  for (double t : distinct) {
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (scores[i] >= t) (labels[i] == 1 ? tp : fp) += 1.0;
    }
    const double recall = tp / total_pos;
    const double precision = tp / (tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

}  // namespace

TEST_CASE("confusion reproduces the forest fixture counts") {
  // 1874 hits scored above threshold, 5 misses below, 140 false alarms, 836
  // correct rejections.
  std::vector<int> labels;
  std::vector<double> scores;
  auto add = [&](int n, int label, double score) {
    for (int i = 0; i < n; ++i) {
      labels.push_back(label);
      scores.push_back(score);
    }
  };
  add(1874, 1, 0.9);
  add(5, 1, 0.1);
  add(140, 0, 0.8);
  add(836, 0, 0.2);

  const ConfusionMatrix cm = confusion(labels, scores, 0.5);
  CHECK(cm.tp == 1874);
  CHECK(cm.fn == 5);
  CHECK(cm.fp == 140);
  CHECK(cm.tn == 836);

  const DerivedMetrics m = derived_metrics(cm);
  CHECK(std::abs(*m.accuracy - 0.949) <= 0.0005);
  CHECK(std::abs(*m.precision - 0.930) <= 0.0005);
  CHECK(std::abs(*m.recall - 0.997) <= 0.0005);
  CHECK(std::abs(*m.f1 - 0.963) <= 0.0005);
}

TEST_CASE("derived_metrics matches the grassland fixture") {
  const ConfusionMatrix cm{1900, 98, 29, 1399};
  const DerivedMetrics m = derived_metrics(cm);
  CHECK(std::abs(*m.accuracy - 0.963) <= 0.0005);
  CHECK(std::abs(*m.precision - 0.951) <= 0.0005);
  CHECK(std::abs(*m.recall - 0.985) <= 0.0005);
  CHECK(std::abs(*m.f1 - 0.968) <= 0.0005);
}

TEST_CASE("confusion edge cases") {
  const std::vector<int> ones{1, 1, 1};
  const std::vector<double> top{1.0, 1.0, 1.0};
  const ConfusionMatrix cm = confusion(ones, top, 0.5);
  CHECK(cm.tp == 3);
  CHECK(cm.fn == 0);

  const std::vector<double> low{0.2, 0.3, 0.4};
  const ConfusionMatrix none = confusion(ones, low, 0.5);
  CHECK(none.tp == 0);
  CHECK(none.fn == 3);

  CHECK_THROWS_AS(confusion(std::vector<int>{1}, std::vector<double>{0.5, 0.5}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(confusion(std::vector<int>{}, std::vector<double>{}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("derived_metrics undefined markers") {
  const DerivedMetrics m = derived_metrics(ConfusionMatrix{0, 0, 3, 5});
  CHECK_FALSE(m.precision.has_value());
  CHECK(m.recall.has_value());
  CHECK_FALSE(m.f1.has_value());
  CHECK(*m.accuracy == doctest::Approx(5.0 / 8.0));
}

TEST_CASE("roc_auc hand cases") {
  const std::vector<int> labels{1, 0, 1, 0};
  const std::vector<double> scores{0.9, 0.8, 0.3, 0.2};
  CHECK(roc_auc(labels, scores) == doctest::Approx(0.75).epsilon(1e-12));

  const std::vector<double> equal{0.4, 0.4, 0.4, 0.4};
  CHECK(roc_auc(labels, equal) == doctest::Approx(0.5).epsilon(1e-12));

  const std::vector<double> separated{0.9, 0.1, 0.8, 0.2};
  CHECK(roc_auc(labels, separated) == doctest::Approx(1.0));

  CHECK_THROWS_AS(roc_auc(std::vector<int>{1, 1}, std::vector<double>{0.1, 0.2}),
                  std::invalid_argument);
}

TEST_CASE("roc_auc equals the pairwise oracle on random instances") {
  Rng rng(314);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(199);
    std::vector<int> labels(n);
    std::vector<double> scores(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(rng.uniform_below(2));
      // coarse grid forces plenty of ties
      scores[i] = static_cast<double>(rng.uniform_below(8)) / 7.0;
      (labels[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
      labels[0] = 1;
      labels[n - 1] = 0;
    }
    CHECK(std::abs(roc_auc(labels, scores) - auc_oracle(labels, scores)) <= 1e-12);
  }
}

TEST_CASE("roc_auc is invariant under strictly increasing score transforms") {
  Rng rng(271);
  std::vector<int> labels(100);
  std::vector<double> scores(100);
  for (std::size_t i = 0; i < 100; ++i) {
    labels[i] = static_cast<int>(rng.uniform_below(2));
    scores[i] = rng.uniform();
  }
  labels[0] = 1;
  labels[1] = 0;
  std::vector<double> warped = scores;
  for (double& s : warped) s = std::exp(5.0 * s) + 3.0;
  CHECK(roc_auc(labels, scores) == doctest::Approx(roc_auc(labels, warped)).epsilon(1e-12));
}

TEST_CASE("roc_curve endpoints and trapezoid identity") {
  Rng rng(161);
  std::vector<int> labels(150);
  std::vector<double> scores(150);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<int>(rng.uniform_below(2));
    scores[i] = static_cast<double>(rng.uniform_below(12)) / 11.0;
  }
  labels[0] = 1;
  labels[1] = 0;

  const auto curve = roc_curve(labels, scores);
  CHECK(curve.front().fpr == 0.0);
  CHECK(curve.front().tpr == 0.0);
  CHECK(curve.back().fpr == 1.0);
  CHECK(curve.back().tpr == 1.0);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].fpr >= curve[i - 1].fpr);
    CHECK(curve[i].tpr >= curve[i - 1].tpr);
  }

  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].fpr - curve[i - 1].fpr) * 0.5 * (curve[i].tpr + curve[i - 1].tpr);
  CHECK(area == doctest::Approx(roc_auc(labels, scores)).epsilon(1e-12));
}

TEST_CASE("pr_curve_and_auc") {
  SUBCASE("perfect ranking") {
    const std::vector<int> labels{1, 1, 0, 0};
    const std::vector<double> scores{0.9, 0.8, 0.2, 0.1};
    CHECK(pr_curve_and_auc(labels, scores).second == doctest::Approx(1.0));
  }
  SUBCASE("constant scores collapse to prevalence") {
    const std::vector<int> labels{1, 0, 0, 1, 0};
    const std::vector<double> scores{0.5, 0.5, 0.5, 0.5, 0.5};
    CHECK(pr_curve_and_auc(labels, scores).second == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("step enumeration example") {
    const std::vector<int> labels{1, 0, 1, 0};
    const std::vector<double> scores{0.9, 0.8, 0.3, 0.2};
    const auto [points, ap] = pr_curve_and_auc(labels, scores);
    CHECK(ap == doctest::Approx(0.5 + 0.5 * (2.0 / 3.0)).epsilon(1e-12));
    REQUIRE(points.size() == 4);
    CHECK(points[0].recall == doctest::Approx(0.5));
    CHECK(points[0].precision == doctest::Approx(1.0));
  }
  SUBCASE("no positives rejected") {
    CHECK_THROWS_AS(pr_curve_and_auc(std::vector<int>{0, 0}, std::vector<double>{0.1, 0.2}),
                    std::invalid_argument);
  }
  SUBCASE("matches the step oracle on random instances") {
    Rng rng(999);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 2 + rng.uniform_below(80);
      std::vector<int> labels(n);
      std::vector<double> scores(n);
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(rng.uniform_below(2));
        scores[i] = static_cast<double>(rng.uniform_below(6)) / 5.0;
      }
      labels[0] = 1;
      CHECK(std::abs(pr_curve_and_auc(labels, scores).second - ap_oracle(labels, scores)) <=
            1e-12);
    }
  }
}

TEST_CASE("brier") {
  CHECK(brier(std::vector<int>{1, 0}, std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(brier(std::vector<int>{1}, std::vector<double>{0.5}) == doctest::Approx(0.25));
  CHECK(brier(std::vector<int>{1, 0}, std::vector<double>{0.8, 0.4}) ==
        doctest::Approx(0.10).epsilon(1e-12));
  CHECK_THROWS_AS(brier(std::vector<int>{}, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(brier(std::vector<int>{1}, std::vector<double>{1.5}), std::invalid_argument);

  // clamped scores reduce to classification error
  Rng rng(55);
  std::vector<int> labels(200);
  std::vector<double> hard(200);
  double errors = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    labels[i] = static_cast<int>(rng.uniform_below(2));
    hard[i] = static_cast<double>(rng.uniform_below(2));
    if (hard[i] != labels[i]) errors += 1.0;
  }
  CHECK(brier(labels, hard) == doctest::Approx(errors / 200.0).epsilon(1e-12));
}

TEST_CASE("reliability_bins") {
  SUBCASE("hand binning") {
    const std::vector<int> labels{0, 1, 1, 1};
    const std::vector<double> scores{0.05, 0.05, 0.95, 0.95};
    const auto rb = reliability_bins(labels, scores, 10);
    REQUIRE(rb.bins.size() == 10);
    CHECK(rb.bins[0].count == 2);
    CHECK(rb.bins[0].mean_predicted == doctest::Approx(0.05));
    CHECK(rb.bins[0].observed_frequency == doctest::Approx(0.5));
    CHECK(rb.bins[9].count == 2);
    CHECK(rb.bins[9].mean_predicted == doctest::Approx(0.95));
    CHECK(rb.bins[9].observed_frequency == doctest::Approx(1.0));
    for (int b = 1; b < 9; ++b) CHECK(rb.bins[b].count == 0);
  }
  SUBCASE("score exactly 1.0 lands in the top bin") {
    const auto rb = reliability_bins(std::vector<int>{1}, std::vector<double>{1.0}, 10);
    CHECK(rb.bins[9].count == 1);
  }
  SUBCASE("counts always partition n") {
    Rng rng(808);
    std::vector<int> labels(500);
    std::vector<double> scores(500);
    for (std::size_t i = 0; i < 500; ++i) {
      labels[i] = static_cast<int>(rng.uniform_below(2));
      scores[i] = rng.uniform();
    }
    const auto rb = reliability_bins(labels, scores, 7);
    std::int64_t total = 0;
    for (const auto& b : rb.bins) {
      total += b.count;
      if (b.count > 0) {
        CHECK(b.mean_predicted >= b.lo);
        CHECK(b.mean_predicted <= b.hi);
      }
    }
    CHECK(total == 500);
  }
  SUBCASE("all scores in one bin") {
    const std::vector<int> labels{0, 1, 0};
    const std::vector<double> scores{0.42, 0.44, 0.41};
    const auto rb = reliability_bins(labels, scores, 10);
    CHECK(rb.bins[4].count == 3);
  }
}

TEST_CASE("topk_capture") {
  const std::vector<int> labels{1, 0, 1, 0};
  const std::vector<double> scores{0.9, 0.8, 0.7, 0.6};
  const std::vector<double> half{0.5};
  CHECK(topk_capture(labels, scores, half)[0].captured_fraction == doctest::Approx(0.5));

  const std::vector<double> full{1.0};
  CHECK(topk_capture(labels, scores, full)[0].captured_fraction == doctest::Approx(1.0));

  const std::vector<int> perfect_labels{1, 1, 0, 0};
  CHECK(topk_capture(perfect_labels, scores, half)[0].captured_fraction == doctest::Approx(1.0));

  SUBCASE("monotone in k and 1.0 at k=1") {
    Rng rng(3);
    std::vector<int> y(300);
    std::vector<double> s(300);
    for (std::size_t i = 0; i < 300; ++i) {
      y[i] = static_cast<int>(rng.uniform_below(2));
      s[i] = rng.uniform();
    }
    y[0] = 1;
    const auto grid = default_topk_grid();
    const auto curve = topk_capture(y, s, grid);
    for (std::size_t i = 1; i < curve.size(); ++i)
      CHECK(curve[i].captured_fraction >= curve[i - 1].captured_fraction);
    CHECK(curve.back().captured_fraction == doctest::Approx(1.0));
  }
  SUBCASE("contract violations") {
    CHECK_THROWS_AS(topk_capture(std::vector<int>{0, 0}, std::vector<double>{0.1, 0.2},
                                 std::vector<double>{0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        topk_capture(labels, scores, std::vector<double>{0.0}), std::invalid_argument);
  }
}

TEST_CASE("bootstrap_ci") {
  Rng rng(12345);
  std::vector<int> labels(200);
  std::vector<double> scores(200);
  for (std::size_t i = 0; i < 200; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.uniform() < scores[i] ? 1 : 0;
  }
  labels[0] = 1;
  labels[1] = 0;

  SUBCASE("interval contains the point estimate on a healthy fixture") {
    const auto ci = bootstrap_ci(MetricKind::RocAuc, labels, scores, 300, 0.95, 7);
    CHECK(ci.lo <= ci.point);
    CHECK(ci.point <= ci.hi);
    CHECK(ci.skipped == 0);
  }
  SUBCASE("same seed gives identical intervals, different seed moves them") {
    const auto a = bootstrap_ci(MetricKind::Brier, labels, scores, 200, 0.9, 42);
    const auto b = bootstrap_ci(MetricKind::Brier, labels, scores, 200, 0.9, 42);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    const auto c = bootstrap_ci(MetricKind::Brier, labels, scores, 200, 0.9, 43);
    CHECK((a.lo != c.lo || a.hi != c.hi));
  }
  SUBCASE("thread count does not change the interval") {
    const auto a = bootstrap_ci(MetricKind::RocAuc, labels, scores, 200, 0.95, 17, 0.5, 1);
    const auto b = bootstrap_ci(MetricKind::RocAuc, labels, scores, 200, 0.95, 17, 0.5, 4);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
  }
  SUBCASE("degenerate data collapses the interval") {
    const std::vector<int> y{1, 1, 0, 0};
    const std::vector<double> s{0.9, 0.9, 0.1, 0.1};
    const auto ci = bootstrap_ci(MetricKind::RocAuc, y, s, 150, 0.95, 3);
    CHECK(ci.lo == doctest::Approx(1.0));
    CHECK(ci.hi == doctest::Approx(1.0));
    CHECK(ci.point == doctest::Approx(1.0));
  }
  SUBCASE("metric undefined on the full sample is rejected") {
    const std::vector<int> y{1, 1};
    const std::vector<double> s{0.9, 0.8};
    CHECK_THROWS_AS(bootstrap_ci(MetricKind::RocAuc, y, s, 150, 0.95, 3),
                    std::invalid_argument);
  }
  SUBCASE("B below 100 is rejected") {
    CHECK_THROWS_AS(bootstrap_ci(MetricKind::Brier, labels, scores, 50, 0.95, 3),
                    std::invalid_argument);
  }
}

TEST_CASE("calibration property on perfectly calibrated synthetic scores") {
  Rng rng(90210);
  const std::size_t n = 10000;
  std::vector<int> labels(n);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.uniform() < scores[i] ? 1 : 0;
  }
  const auto rb = reliability_bins(labels, scores, 10);
  for (const auto& b : rb.bins) {
    if (b.count < 50) continue;
    const double p = b.mean_predicted;
    const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(b.count));
    CHECK(std::abs(b.observed_frequency - p) <= 3.0 * sd);
  }

  // truth scores beat every constant predictor on Brier
  const double truth_brier = brier(labels, scores);
  for (double c : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    const std::vector<double> constant(n, c);
    CHECK(truth_brier <= brier(labels, constant));
  }
}

TEST_CASE("evaluate assembles a full report and serializes stably") {
  Rng rng(2);
  std::vector<int> labels(300);
  std::vector<double> scores(300);
  for (std::size_t i = 0; i < 300; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.uniform() < scores[i] ? 1 : 0;
  }
  labels[0] = 1;
  labels[1] = 0;

  EvalOptions options;
  options.bootstrap_B = 150;
  options.seed = 5;
  const EvalReport report = evaluate(labels, scores, options);
  CHECK(report.n == 300);
  CHECK(report.curves.roc_auc.has_value());
  CHECK(report.intervals.size() == 3);

  const std::string text = write_eval_report(report);
  CHECK(text == write_eval_report(evaluate(labels, scores, options)));
  CHECK(text.find("roc_auc ") != std::string::npos);
  CHECK(text.find("[roc]") != std::string::npos);
  CHECK(text.find("[end]") != std::string::npos);

  // single-class input: undefined AUC rather than a crash
  const std::vector<int> ones(10, 1);
  const std::vector<double> s(10, 0.7);
  const EvalReport degenerate = evaluate(ones, s, EvalOptions{});
  CHECK_FALSE(degenerate.curves.roc_auc.has_value());
  CHECK(write_eval_report(degenerate).find("roc_auc undefined") != std::string::npos);
}
