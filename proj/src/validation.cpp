#include "firemap/validation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "firemap/rng.hpp"

namespace firemap {

namespace {

std::vector<double> linspace01(int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / (points - 1);
  return grid;
}

// Upper envelope of a ROC polyline: one (fpr, max tpr) pair per distinct
// fpr, monotone in both coordinates.
std::vector<std::pair<double, double>> roc_envelope(const std::vector<RocPoint>& roc) {
  std::vector<std::pair<double, double>> env;
  for (const auto& p : roc) {
    if (!env.empty() && env.back().first == p.fpr) {
      env.back().second = std::max(env.back().second, p.tpr);
    } else {
      env.emplace_back(p.fpr, p.tpr);
    }
  }
  return env;
}

double interp_envelope(const std::vector<std::pair<double, double>>& env, double x) {
  if (env.empty()) return 0.0;
  if (x <= env.front().first) return env.front().second;
  for (std::size_t i = 1; i < env.size(); ++i) {
    if (x <= env[i].first) {
      const auto& [x0, y0] = env[i - 1];
      const auto& [x1, y1] = env[i];
      return y0 + (x - x0) / (x1 - x0) * (y1 - y0);
    }
  }
  return env.back().second;
}

// Step interpolation of a PR curve: precision at the first threshold point
// whose recall reaches r.
double interp_pr(const std::vector<PrPoint>& pr, double recall) {
  for (const auto& p : pr)
    if (p.recall >= recall) return p.precision;
  return pr.empty() ? 0.0 : pr.back().precision;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

Dataset subset(const Dataset& d, const std::vector<std::size_t>& rows) {
  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (std::size_t r : rows) samples.push_back(d[r]);
  return Dataset(d.schema(), std::move(samples));
}

void check_fold_hygiene(const Dataset& train, const Dataset& test, const std::string& fold_id) {
  std::unordered_set<std::string> test_ids;
  test_ids.reserve(test.size());
  for (const Sample& s : test.samples()) test_ids.insert(s.id);
  for (const Sample& s : train.samples())
    if (test_ids.count(s.id))
      throw std::logic_error("validation: sample id '" + s.id +
                             "' appears on both sides of fold " + fold_id);
}

}  // namespace

SplitPlan leave_one_region_out_plan(const Dataset& d) {
  std::set<std::string> regions;
  for (const Sample& s : d.samples()) regions.insert(s.region_id);
  if (regions.size() < 2)
    throw std::invalid_argument("leave_one_region_out_plan: need at least two regions");
  SplitPlan plan;
  plan.kind = SplitPlan::Kind::SpatialTransfer;
  for (const std::string& test_region : regions) {
    SplitPlan::Fold fold;
    fold.id = test_region;
    fold.test_regions.push_back(test_region);
    for (const std::string& r : regions)
      if (r != test_region) fold.train_regions.push_back(r);
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

TemporalSplitResult temporal_split(const Dataset& d, const std::vector<int>& train_years,
                                   const std::vector<int>& test_years) {
  if (train_years.empty() || test_years.empty())
    throw std::invalid_argument("temporal_split: year sets must be non-empty");
  const std::set<int> train_set(train_years.begin(), train_years.end());
  const std::set<int> test_set(test_years.begin(), test_years.end());
  for (int y : train_set)
    if (test_set.count(y))
      throw std::invalid_argument("temporal_split: year " + std::to_string(y) +
                                  " appears in both sets");

  std::vector<std::size_t> train_rows, test_rows;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (train_set.count(d[i].year)) {
      train_rows.push_back(i);
    } else if (test_set.count(d[i].year)) {
      test_rows.push_back(i);
    } else {
      ++dropped;
    }
  }
  if (train_rows.empty()) throw std::invalid_argument("temporal_split: empty train side");
  if (test_rows.empty()) throw std::invalid_argument("temporal_split: empty test side");
  return {subset(d, train_rows), subset(d, test_rows), dropped};
}

std::vector<std::pair<Dataset, Dataset>> spatial_transfer_split(const Dataset& d,
                                                                const SplitPlan& plan) {
  if (plan.kind != SplitPlan::Kind::SpatialTransfer)
    throw std::invalid_argument("spatial_transfer_split: plan is not spatial");
  if (plan.folds.empty()) throw std::invalid_argument("spatial_transfer_split: no folds");

  std::set<std::string> known_regions;
  for (const Sample& s : d.samples()) known_regions.insert(s.region_id);

  std::vector<std::pair<Dataset, Dataset>> out;
  for (const auto& fold : plan.folds) {
    std::set<std::string> train_set(fold.train_regions.begin(), fold.train_regions.end());
    std::set<std::string> test_set(fold.test_regions.begin(), fold.test_regions.end());
    if (train_set.empty() || test_set.empty())
      throw std::invalid_argument("spatial_transfer_split: fold '" + fold.id +
                                  "' has an empty selector");
    for (const std::string& r : train_set)
      if (test_set.count(r))
        throw std::invalid_argument("spatial_transfer_split: region '" + r +
                                    "' appears on both sides of fold '" + fold.id + "'");
    for (const std::string& r : train_set)
      if (!known_regions.count(r))
        throw std::invalid_argument("spatial_transfer_split: unknown region '" + r + "'");
    for (const std::string& r : test_set)
      if (!known_regions.count(r))
        throw std::invalid_argument("spatial_transfer_split: unknown region '" + r + "'");

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (train_set.count(d[i].region_id)) train_rows.push_back(i);
      else if (test_set.count(d[i].region_id)) test_rows.push_back(i);
    }
    if (train_rows.empty())
      throw std::invalid_argument("spatial_transfer_split: fold '" + fold.id +
                                  "' has an empty train side");
    if (test_rows.empty())
      throw std::invalid_argument("spatial_transfer_split: fold '" + fold.id +
                                  "' has an empty test side");
    out.emplace_back(subset(d, train_rows), subset(d, test_rows));
  }
  return out;
}

ValidationResult run_validation(const Dataset& d, const SplitPlan& plan,
                                const ForestParams& params, const ValidationOptions& options) {
  std::vector<std::pair<Dataset, Dataset>> folds;
  std::vector<std::string> fold_ids;
  std::size_t dropped = 0;

  if (plan.kind == SplitPlan::Kind::TemporalSplit) {
    auto split = temporal_split(d, plan.train_years, plan.test_years);
    dropped = split.dropped;
    folds.emplace_back(std::move(split.train), std::move(split.test));
    fold_ids.push_back("temporal");
  } else {
    folds = spatial_transfer_split(d, plan);
    for (const auto& fold : plan.folds) fold_ids.push_back(fold.id);
  }

  if (!options.retrain_per_fold) {
    // Shared-model mode requires one common train selector.
    for (std::size_t k = 1; k < folds.size(); ++k) {
      if (folds[k].first.size() != folds[0].first.size())
        throw std::invalid_argument(
            "run_validation: shared-model mode needs identical train sides across folds");
      for (std::size_t i = 0; i < folds[k].first.size(); ++i)
        if (folds[k].first[i].id != folds[0].first[i].id)
          throw std::invalid_argument(
              "run_validation: shared-model mode needs identical train sides across folds");
    }
  }

  ValidationResult result;
  result.dropped = dropped;

  const std::uint64_t fold_root = derive_seed(params.seed, kStreamFold);
  std::optional<Forest> shared_model;

  for (std::size_t k = 0; k < folds.size(); ++k) {
    const Dataset& train = folds[k].first;
    const Dataset& test = folds[k].second;
    check_fold_hygiene(train, test, fold_ids[k]);

    const Forest* model = nullptr;
    std::optional<Forest> fold_model;
    try {
      if (options.retrain_per_fold) {
        ForestParams fold_params = params;
        fold_params.seed = derive_seed(fold_root, k);
        fold_model = train_forest(train, fold_params, options.threads);
        model = &*fold_model;
      } else {
        if (!shared_model) {
          ForestParams fold_params = params;
          fold_params.seed = derive_seed(fold_root, 0);
          shared_model = train_forest(train, fold_params, options.threads);
        }
        model = &*shared_model;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("run_validation: fold '" + fold_ids[k] +
                               "' failed to train: " + e.what());
    }

    std::vector<int> labels;
    std::vector<double> scores;
    labels.reserve(test.size());
    scores.reserve(test.size());
    for (const Sample& s : test.samples()) {
      labels.push_back(s.label);
      scores.push_back(predict_proba(*model, s.values));
    }

    FoldResult fr;
    fr.fold_id = fold_ids[k];
    fr.train_size = train.size();
    fr.test_size = test.size();
    fr.test_positive_rate = positive_rate(test);
    EvalOptions eval_options = options.eval;
    eval_options.seed = derive_seed(fold_root, k);
    eval_options.threads = options.threads;
    fr.report = evaluate(labels, scores, eval_options);
    result.folds.push_back(std::move(fr));
  }

  // --- aggregation ---------------------------------------------------------
  AggregatedCurves& agg = result.aggregate;
  const auto grid = linspace01(options.curve_grid_points);

  std::vector<double> column;
  column.reserve(result.folds.size());

  std::vector<std::vector<std::pair<double, double>>> envelopes;
  for (const auto& fr : result.folds)
    if (!fr.report.curves.roc.empty()) envelopes.push_back(roc_envelope(fr.report.curves.roc));

  for (double x : grid) {
    column.clear();
    for (const auto& env : envelopes) column.push_back(interp_envelope(env, x));
    if (!column.empty()) {
      const MeanSd ms = mean_sd(column);
      agg.roc.push_back({x, ms.mean, ms.sd});
    }
  }
  for (double x : grid) {
    column.clear();
    for (const auto& fr : result.folds)
      if (!fr.report.curves.pr.empty()) column.push_back(interp_pr(fr.report.curves.pr, x));
    if (!column.empty()) {
      const MeanSd ms = mean_sd(column);
      agg.pr.push_back({x, ms.mean, ms.sd});
    }
  }
  for (std::size_t ki = 0; ki < options.eval.k_grid.size(); ++ki) {
    column.clear();
    for (const auto& fr : result.folds)
      if (ki < fr.report.topk.size()) column.push_back(fr.report.topk[ki].captured_fraction);
    if (!column.empty()) {
      const MeanSd ms = mean_sd(column);
      agg.topk.push_back({options.eval.k_grid[ki], ms.mean, ms.sd});
    }
  }

  for (int b = 0; b < options.eval.n_bins; ++b) {
    AggregatedCurves::BinAggregate bin;
    bin.lo = static_cast<double>(b) / options.eval.n_bins;
    bin.hi = static_cast<double>(b + 1) / options.eval.n_bins;
    std::vector<double> mean_pred, observed, counts;
    for (const auto& fr : result.folds) {
      const auto& rb = fr.report.reliability.bins[b];
      counts.push_back(static_cast<double>(rb.count));
      if (rb.count > 0) {
        mean_pred.push_back(rb.mean_predicted);
        observed.push_back(rb.observed_frequency);
      }
    }
    bin.folds_with_data = static_cast<int>(observed.size());
    bin.mean_count = mean_sd(counts).mean;
    if (!observed.empty()) {
      bin.mean_predicted = mean_sd(mean_pred).mean;
      const MeanSd ms = mean_sd(observed);
      bin.observed_mean = ms.mean;
      bin.observed_sd = ms.sd;
    }
    agg.reliability.push_back(bin);
  }

  auto aggregate_scalar = [&](const std::string& name, auto getter) {
    std::vector<double> values;
    for (const auto& fr : result.folds) {
      const auto v = getter(fr);
      if (v) values.push_back(*v);
    }
    if (values.empty()) return;
    const MeanSd ms = mean_sd(values);
    agg.scalars[name] = {ms.mean, ms.sd, static_cast<int>(values.size())};
  };

  using OptD = std::optional<double>;
  aggregate_scalar("roc_auc", [](const FoldResult& fr) { return fr.report.curves.roc_auc; });
  aggregate_scalar("pr_auc", [](const FoldResult& fr) { return fr.report.curves.pr_auc; });
  aggregate_scalar("brier", [](const FoldResult& fr) { return OptD(fr.report.brier); });
  aggregate_scalar("accuracy", [](const FoldResult& fr) { return fr.report.derived.accuracy; });
  aggregate_scalar("precision", [](const FoldResult& fr) { return fr.report.derived.precision; });
  aggregate_scalar("recall", [](const FoldResult& fr) { return fr.report.derived.recall; });
  aggregate_scalar("f1", [](const FoldResult& fr) { return fr.report.derived.f1; });
  aggregate_scalar("positive_rate",
                   [](const FoldResult& fr) { return OptD(fr.test_positive_rate); });

  return result;
}

std::string write_aggregate_report(const AggregatedCurves& agg) {
  std::string out = "firemap aggregate report 1\n";
  out += "[scalars]\nmetric,mean,sd,folds\n";
  for (const auto& [name, s] : agg.scalars)
    out += name + "," + format_double(s.mean) + "," + format_double(s.sd) + "," +
           std::to_string(s.folds) + "\n";
  out += "[roc]\nfpr,mean_tpr,sd_tpr\n";
  for (const auto& p : agg.roc)
    out += format_double(p.x) + "," + format_double(p.mean) + "," + format_double(p.sd) + "\n";
  out += "[pr]\nrecall,mean_precision,sd_precision\n";
  for (const auto& p : agg.pr)
    out += format_double(p.x) + "," + format_double(p.mean) + "," + format_double(p.sd) + "\n";
  out += "[topk]\nk_fraction,mean_captured,sd_captured\n";
  for (const auto& p : agg.topk)
    out += format_double(p.x) + "," + format_double(p.mean) + "," + format_double(p.sd) + "\n";
  out += "[reliability]\nbin_lo,bin_hi,folds_with_data,mean_predicted,observed_mean,observed_sd,"
         "mean_count\n";
  for (const auto& b : agg.reliability) {
    out += format_double(b.lo) + "," + format_double(b.hi) + "," +
           std::to_string(b.folds_with_data) + ",";
    if (b.folds_with_data > 0) {
      out += format_double(b.mean_predicted) + "," + format_double(b.observed_mean) + "," +
             format_double(b.observed_sd);
    } else {
      out += "empty,empty,empty";
    }
    out += "," + format_double(b.mean_count) + "\n";
  }
  out += "[end]\n";
  return out;
}

}  // namespace firemap
