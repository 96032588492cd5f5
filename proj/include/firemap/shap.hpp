#pragma once

#include <span>
#include <string>
#include <vector>

#include "firemap/data.hpp"
#include "firemap/forest.hpp"

namespace firemap {

// Additive attribution of one prediction: base_value + sum(contributions)
// equals the prediction (efficiency axiom, within 1e-9).
struct ShapExplanation {
  double base_value = 0.0;
  std::vector<double> contributions;
  double prediction = 0.0;
};

struct ImportanceRow {
  std::string feature;
  double mean_abs_shap = 0.0;
  int rank = 0;  // 1 = most important
};

struct BeeswarmRecord {
  std::string sample_id;
  std::string feature;
  double value = 0.0;
  double shap = 0.0;
};

struct ForceEntry {
  std::string feature;
  double contribution = 0.0;
};

// Contributions behind a force plot: nonzero terms, largest magnitude first.
struct ForceDecomposition {
  double base_value = 0.0;
  double prediction = 0.0;
  std::vector<ForceEntry> entries;
};

// Cover-weighted tree-conditional expectation: at a split on a known
// feature follow x, otherwise average the children by cover. known must
// have one flag per schema feature.
double tree_expected_value(const Tree& t, std::span<const double> x,
                           const std::vector<bool>& known);

// Exact Shapley values by subset enumeration over the value function
// above. Exponential in features; capped at 15.
ShapExplanation brute_force_shap(const Tree& t, std::span<const double> x);

// Same values in polynomial time via the path-weight recursion.
ShapExplanation tree_shap(const Tree& t, std::span<const double> x);

// Per-feature mean of tree_shap across the ensemble.
ShapExplanation forest_shap(const Forest& f, std::span<const double> x);

// One explanation per dataset row, in row order.
std::vector<ShapExplanation> explain_dataset(const Forest& f, const Dataset& d, int threads = 1);

std::vector<ImportanceRow> importance_table(const Forest& f, const Dataset& d, int threads = 1);
std::vector<ImportanceRow> importance_from_explanations(
    const FeatureSchema& schema, const std::vector<ShapExplanation>& explanations);

std::vector<BeeswarmRecord> beeswarm_export(const Forest& f, const Dataset& d, int threads = 1);
std::vector<BeeswarmRecord> beeswarm_from_explanations(
    const Dataset& d, const std::vector<ShapExplanation>& explanations);

ForceDecomposition force_decomposition(const Forest& f, std::span<const double> x);

// Delimited-text export formats, stable column order.
std::string importance_csv(const std::vector<ImportanceRow>& rows);
std::string beeswarm_csv(const std::vector<BeeswarmRecord>& records);
std::vector<BeeswarmRecord> parse_beeswarm_csv(std::string_view text);
std::string force_csv(const ForceDecomposition& fd);

}  // namespace firemap
