#pragma once

#include <string>
#include <vector>

#include "firemap/data.hpp"
#include "firemap/forest.hpp"

namespace firemap::testing {

// Dataset over features f0..f{p-1} with synthetic metadata.
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels,
                            const std::vector<std::string>& regions = {},
                            const std::vector<int>& years = {}) {
  const std::size_t p = rows.empty() ? 1 : rows[0].size();
  std::vector<Feature> features;
  for (std::size_t j = 0; j < p; ++j) features.push_back({"f" + std::to_string(j), ""});
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Sample s;
    s.id = "r" + std::to_string(i);
    s.lon = static_cast<double>(i);
    s.lat = 0.0;
    s.region_id = regions.empty() ? "A" : regions[i];
    s.district_id = s.region_id;
    s.stratum = Stratum::Forest;
    s.year = years.empty() ? 2024 : years[i];
    s.label = labels[i];
    s.values = rows[i];
    samples.push_back(std::move(s));
  }
  return Dataset(FeatureSchema(std::move(features)), std::move(samples));
}

// Hand-built depth-1 tree: x[feature] <= threshold -> left leaf.
inline Tree stump(int feature, double threshold, double left_value, double right_value,
                  std::int64_t left_cover = 2, std::int64_t right_cover = 2) {
  Tree t;
  TreeNode root;
  root.feature = feature;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  root.cover = left_cover + right_cover;
  TreeNode left;
  left.value = left_value;
  left.cover = left_cover;
  TreeNode right;
  right.value = right_value;
  right.cover = right_cover;
  t.nodes = {root, left, right};
  return t;
}

inline Tree single_leaf(double value, std::int64_t cover = 1) {
  Tree t;
  TreeNode leaf;
  leaf.value = value;
  leaf.cover = cover;
  t.nodes = {leaf};
  return t;
}

inline Forest forest_of(std::vector<Tree> trees, std::size_t p) {
  std::vector<Feature> features;
  for (std::size_t j = 0; j < p; ++j) features.push_back({"f" + std::to_string(j), ""});
  ForestParams params;
  params.n_trees = static_cast<int>(trees.size());
  params.mtry = static_cast<int>(p);
  Forest f{std::move(trees), params, FeatureSchema(std::move(features))};
  for (Tree& t : f.trees) t.schema_fingerprint = f.schema.fingerprint();
  return f;
}

}  // namespace firemap::testing
