#pragma once

#include <map>
#include <string>
#include <vector>

#include "firemap/data.hpp"
#include "firemap/forest.hpp"
#include "firemap/metrics.hpp"

namespace firemap {

// Train/test assignment for one evaluation round. Spatial plans carry one
// or more folds keyed by region ids; temporal plans carry year sets.
struct SplitPlan {
  enum class Kind { SpatialTransfer, TemporalSplit };

  struct Fold {
    std::string id;
    std::vector<std::string> train_regions;
    std::vector<std::string> test_regions;
  };

  Kind kind = Kind::SpatialTransfer;
  std::vector<Fold> folds;       // spatial
  std::vector<int> train_years;  // temporal
  std::vector<int> test_years;
};

// One fold per region: test on it, train on the rest.
SplitPlan leave_one_region_out_plan(const Dataset& d);

struct TemporalSplitResult {
  Dataset train;
  Dataset test;
  std::size_t dropped = 0;  // rows in neither year set
};

TemporalSplitResult temporal_split(const Dataset& d, const std::vector<int>& train_years,
                                   const std::vector<int>& test_years);

std::vector<std::pair<Dataset, Dataset>> spatial_transfer_split(const Dataset& d,
                                                                const SplitPlan& plan);

struct FoldResult {
  std::string fold_id;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double test_positive_rate = 0.0;
  EvalReport report;
};

struct MeanSdPoint {
  double x = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

struct AggregatedCurves {
  std::vector<MeanSdPoint> roc;   // x = fpr grid
  std::vector<MeanSdPoint> pr;    // x = recall grid
  std::vector<MeanSdPoint> topk;  // x = k grid

  struct BinAggregate {
    double lo = 0.0;
    double hi = 0.0;
    int folds_with_data = 0;
    double mean_predicted = 0.0;
    double observed_mean = 0.0;
    double observed_sd = 0.0;
    double mean_count = 0.0;
  };
  std::vector<BinAggregate> reliability;

  struct ScalarAggregate {
    double mean = 0.0;
    double sd = 0.0;
    int folds = 0;  // folds on which the metric was defined
  };
  std::map<std::string, ScalarAggregate> scalars;
};

struct ValidationOptions {
  EvalOptions eval;
  bool retrain_per_fold = true;  // false: one model shared across folds
  int curve_grid_points = 101;
  int threads = 1;
};

struct ValidationResult {
  std::vector<FoldResult> folds;
  AggregatedCurves aggregate;
  std::size_t dropped = 0;  // temporal plans: rows outside both year sets
};

// Trains and scores every fold (fold-derived seeds), checks train/test id
// hygiene, and aggregates curves on fixed grids as pointwise mean and SD.
ValidationResult run_validation(const Dataset& d, const SplitPlan& plan,
                                const ForestParams& params, const ValidationOptions& options);

std::string write_aggregate_report(const AggregatedCurves& agg);

}  // namespace firemap
