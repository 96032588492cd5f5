#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "firemap/data.hpp"
#include "firemap/rng.hpp"

namespace firemap {

// Flat node record; leaves have feature == -1. Cover is the number of
// training rows that reached the node and weights the conditional
// expectation used by the Shapley traversal.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf only: fraction of label-1 training rows
  std::int64_t cover = 0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at index 0, preorder
  std::uint64_t schema_fingerprint = 0;

  int max_depth() const;
};

struct ForestParams {
  int n_trees = 200;
  int max_depth = 12;
  int min_samples_leaf = 5;
  int mtry = 0;  // 0 = ceil(sqrt(p)), resolved at training time
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct Forest {
  std::vector<Tree> trees;
  ForestParams params;
  FeatureSchema schema;
};

// Column-major copy of a dataset, the layout the trainer works on.
struct TrainingData {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<double> columns;  // n_features blocks of n_rows values
  std::vector<int> labels;

  static TrainingData from(const Dataset& d);
  double value(std::size_t row, std::size_t col) const { return columns[col * n_rows + row]; }
};

// Grows one CART tree on the given rows. Splits minimize weighted child
// Gini over mtry features drawn from rng; thresholds are midpoints between
// consecutive distinct sorted values; ties break toward the lower feature
// index and lower threshold.
Tree train_tree(const TrainingData& data, std::span<const std::size_t> rows,
                const ForestParams& params, Rng& rng, std::uint64_t schema_fingerprint);

// Bagged ensemble. Tree t's random stream is derived solely from
// (params.seed, t), so the forest is identical for any thread count.
Forest train_forest(const Dataset& d, ForestParams params, int threads = 1);

double tree_predict(const Tree& t, std::span<const double> x);
double predict_proba(const Forest& f, std::span<const double> x);
int predict_label(const Forest& f, std::span<const double> x, double threshold);

// Self-describing text format; thresholds and leaf values use shortest
// round-trip decimals, so serialize/parse is exact.
std::string write_forest(const Forest& f);
Forest read_forest(std::string_view text);
Forest read_forest_file(const std::string& path);
void write_forest_file(const Forest& f, const std::string& path);

}  // namespace firemap
