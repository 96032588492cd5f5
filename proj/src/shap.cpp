#include "firemap/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "firemap/parallel.hpp"

namespace firemap {

namespace {

void check_vector(std::size_t p, std::span<const double> x, const char* what) {
  if (x.size() != p)
    throw std::invalid_argument(std::string(what) + ": feature vector length mismatch");
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

double expected_rec(const Tree& t, int idx, std::span<const double> x,
                    const std::vector<bool>& known) {
  const TreeNode& node = t.nodes[idx];
  if (node.is_leaf()) return node.value;
  if (known[node.feature])
    return expected_rec(t, x[node.feature] <= node.threshold ? node.left : node.right, x, known);
  const double total = static_cast<double>(node.cover);
  const double wl = static_cast<double>(t.nodes[node.left].cover) / total;
  const double wr = static_cast<double>(t.nodes[node.right].cover) / total;
  return wl * expected_rec(t, node.left, x, known) + wr * expected_rec(t, node.right, x, known);
}

// --- path-weight recursion ------------------------------------------------
//
// The decision path holds one element per distinct feature encountered so
// far. pweight tracks, per prefix size, the permutation mass of subsets in
// which exactly that many path features are "on".

struct PathElement {
  int feature_index;
  double zero_fraction;  // cover fraction that flows through when feature is unknown
  double one_fraction;   // 1 when x follows this arc, 0 otherwise
  double pweight;
};

void extend_path(PathElement* path, int unique_depth, double zero_fraction, double one_fraction,
                 int feature_index) {
  path[unique_depth] = {feature_index, zero_fraction, one_fraction,
                        unique_depth == 0 ? 1.0 : 0.0};
  for (int i = unique_depth - 1; i >= 0; --i) {
    path[i + 1].pweight +=
        one_fraction * path[i].pweight * (i + 1) / static_cast<double>(unique_depth + 1);
    path[i].pweight =
        zero_fraction * path[i].pweight * (unique_depth - i) / static_cast<double>(unique_depth + 1);
  }
}

void unwind_path(PathElement* path, int unique_depth, int path_index) {
  const double one_fraction = path[path_index].one_fraction;
  const double zero_fraction = path[path_index].zero_fraction;
  double next_one_portion = path[unique_depth].pweight;
  for (int i = unique_depth - 1; i >= 0; --i) {
    if (one_fraction != 0.0) {
      const double tmp = path[i].pweight;
      path[i].pweight =
          next_one_portion * (unique_depth + 1) / static_cast<double>((i + 1) * one_fraction);
      next_one_portion =
          tmp - path[i].pweight * zero_fraction * (unique_depth - i) /
                    static_cast<double>(unique_depth + 1);
    } else {
      path[i].pweight = path[i].pweight * (unique_depth + 1) /
                        static_cast<double>(zero_fraction * (unique_depth - i));
    }
  }
  for (int i = path_index; i < unique_depth; ++i) {
    path[i].feature_index = path[i + 1].feature_index;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_path_sum(const PathElement* path, int unique_depth, int path_index) {
  const double one_fraction = path[path_index].one_fraction;
  const double zero_fraction = path[path_index].zero_fraction;
  double next_one_portion = path[unique_depth].pweight;
  double total = 0.0;
  if (one_fraction != 0.0) {
    for (int i = unique_depth - 1; i >= 0; --i) {
      const double tmp = next_one_portion / static_cast<double>((i + 1) * one_fraction);
      total += tmp;
      next_one_portion = path[i].pweight - tmp * zero_fraction * (unique_depth - i);
    }
  } else {
    for (int i = unique_depth - 1; i >= 0; --i)
      total += path[i].pweight / (zero_fraction * (unique_depth - i));
  }
  return total * (unique_depth + 1);
}

void shap_recurse(const Tree& t, std::span<const double> x, double* phi, int node_index,
                  int unique_depth, PathElement* parent_path, double parent_zero_fraction,
                  double parent_one_fraction, int parent_feature_index) {
  PathElement* path = parent_path + unique_depth + 1;
  std::copy(parent_path, parent_path + unique_depth + 1, path);
  extend_path(path, unique_depth, parent_zero_fraction, parent_one_fraction,
              parent_feature_index);

  const TreeNode& node = t.nodes[node_index];
  if (node.is_leaf()) {
    for (int i = 1; i <= unique_depth; ++i) {
      const double w = unwound_path_sum(path, unique_depth, i);
      const PathElement& el = path[i];
      phi[el.feature_index] += w * (el.one_fraction - el.zero_fraction) * node.value;
    }
    return;
  }

  const int hot = (x[node.feature] <= node.threshold) ? node.left : node.right;
  const int cold = (hot == node.left) ? node.right : node.left;
  const double total = static_cast<double>(node.cover);
  const double hot_zero_fraction = static_cast<double>(t.nodes[hot].cover) / total;
  const double cold_zero_fraction = static_cast<double>(t.nodes[cold].cover) / total;
  double incoming_zero_fraction = 1.0;
  double incoming_one_fraction = 1.0;

  // A feature met twice on one path is unwound and re-extended so the path
  // keeps one element per distinct feature.
  int path_index = 0;
  for (; path_index <= unique_depth; ++path_index)
    if (path[path_index].feature_index == node.feature) break;
  if (path_index != unique_depth + 1) {
    incoming_zero_fraction = path[path_index].zero_fraction;
    incoming_one_fraction = path[path_index].one_fraction;
    unwind_path(path, unique_depth, path_index);
    unique_depth -= 1;
  }

  shap_recurse(t, x, phi, hot, unique_depth + 1, path,
               hot_zero_fraction * incoming_zero_fraction, incoming_one_fraction, node.feature);
  shap_recurse(t, x, phi, cold, unique_depth + 1, path,
               cold_zero_fraction * incoming_zero_fraction, 0.0, node.feature);
}

void check_schema_match(const Forest& f, const Dataset& d) {
  if (f.schema.fingerprint() != d.schema().fingerprint())
    throw std::invalid_argument("explain: model and dataset schemas differ");
}

}  // namespace

double tree_expected_value(const Tree& t, std::span<const double> x,
                           const std::vector<bool>& known) {
  if (known.size() != x.size())
    throw std::invalid_argument("tree_expected_value: known mask length mismatch");
  for (const TreeNode& node : t.nodes)
    if (!node.is_leaf() && static_cast<std::size_t>(node.feature) >= x.size())
      throw std::invalid_argument("tree_expected_value: feature vector shorter than tree arity");
  return expected_rec(t, 0, x, known);
}

ShapExplanation brute_force_shap(const Tree& t, std::span<const double> x) {
  const std::size_t p = x.size();
  if (p > 15) throw std::invalid_argument("brute_force_shap: too many features (max 15)");
  check_vector(p, x, "brute_force_shap");

  // v(S) for every subset mask.
  const std::uint32_t n_masks = 1u << p;
  std::vector<double> v(n_masks);
  std::vector<bool> known(p);
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    for (std::size_t i = 0; i < p; ++i) known[i] = (mask >> i) & 1u;
    v[mask] = expected_rec(t, 0, x, known);
  }

  // weight for |S| = s: s! (p - s - 1)! / p!
  std::vector<double> factorial(p + 1, 1.0);
  for (std::size_t i = 1; i <= p; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);
  std::vector<double> weight(p);
  for (std::size_t s = 0; s < p; ++s)
    weight[s] = factorial[s] * factorial[p - s - 1] / factorial[p];

  ShapExplanation out;
  out.contributions.assign(p, 0.0);
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    const double w = weight[static_cast<std::size_t>(std::popcount(mask))];
    for (std::size_t i = 0; i < p; ++i) {
      if ((mask >> i) & 1u) continue;
      out.contributions[i] += w * (v[mask | (1u << i)] - v[mask]);
    }
  }
  out.base_value = v[0];
  out.prediction = tree_predict(t, x);
  return out;
}

ShapExplanation tree_shap(const Tree& t, std::span<const double> x) {
  const std::size_t p = x.size();
  check_vector(p, x, "tree_shap");
  for (const TreeNode& node : t.nodes)
    if (!node.is_leaf() && static_cast<std::size_t>(node.feature) >= p)
      throw std::invalid_argument("tree_shap: feature vector shorter than tree arity");

  ShapExplanation out;
  out.contributions.assign(p, 0.0);
  const int depth = t.max_depth();
  std::vector<PathElement> buffer(
      static_cast<std::size_t>((depth + 2) * (depth + 3) / 2 + depth + 2));
  shap_recurse(t, x, out.contributions.data(), 0, 0, buffer.data(), 1.0, 1.0, -1);

  const std::vector<bool> nothing_known(p, false);
  out.base_value = expected_rec(t, 0, x, nothing_known);
  out.prediction = tree_predict(t, x);
  return out;
}

ShapExplanation forest_shap(const Forest& f, std::span<const double> x) {
  check_vector(f.schema.size(), x, "forest_shap");
  const std::size_t p = f.schema.size();
  ShapExplanation out;
  out.contributions.assign(p, 0.0);
  double base_sum = 0.0;
  for (const Tree& t : f.trees) {
    const ShapExplanation e = tree_shap(t, x);
    for (std::size_t i = 0; i < p; ++i) out.contributions[i] += e.contributions[i];
    base_sum += e.base_value;
  }
  const double n = static_cast<double>(f.trees.size());
  for (double& c : out.contributions) c /= n;
  out.base_value = base_sum / n;
  out.prediction = predict_proba(f, x);
  return out;
}

std::vector<ShapExplanation> explain_dataset(const Forest& f, const Dataset& d, int threads) {
  check_schema_match(f, d);
  std::vector<ShapExplanation> out(d.size());
  parallel_for(d.size(), threads, [&](std::size_t i) { out[i] = forest_shap(f, d[i].values); });
  return out;
}

std::vector<ImportanceRow> importance_from_explanations(
    const FeatureSchema& schema, const std::vector<ShapExplanation>& explanations) {
  if (explanations.empty())
    throw std::invalid_argument("importance_table: empty dataset");
  const std::size_t p = schema.size();
  std::vector<double> mean_abs(p, 0.0);
  for (const auto& e : explanations)
    for (std::size_t i = 0; i < p; ++i) mean_abs[i] += std::abs(e.contributions[i]);
  for (double& m : mean_abs) m /= static_cast<double>(explanations.size());

  std::vector<std::size_t> order(p);
  for (std::size_t i = 0; i < p; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mean_abs[a] != mean_abs[b]) return mean_abs[a] > mean_abs[b];
    return a < b;
  });

  std::vector<ImportanceRow> rows;
  rows.reserve(p);
  for (std::size_t r = 0; r < p; ++r)
    rows.push_back({schema.at(order[r]).name, mean_abs[order[r]], static_cast<int>(r + 1)});
  return rows;
}

std::vector<ImportanceRow> importance_table(const Forest& f, const Dataset& d, int threads) {
  return importance_from_explanations(f.schema, explain_dataset(f, d, threads));
}

std::vector<BeeswarmRecord> beeswarm_from_explanations(
    const Dataset& d, const std::vector<ShapExplanation>& explanations) {
  if (explanations.size() != d.size())
    throw std::invalid_argument("beeswarm_export: explanation count mismatch");
  if (d.empty()) throw std::invalid_argument("beeswarm_export: empty dataset");
  std::vector<BeeswarmRecord> records;
  records.reserve(d.size() * d.schema().size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Sample& s = d[i];
    for (std::size_t j = 0; j < d.schema().size(); ++j)
      records.push_back(
          {s.id, d.schema().at(j).name, s.values[j], explanations[i].contributions[j]});
  }
  return records;
}

std::vector<BeeswarmRecord> beeswarm_export(const Forest& f, const Dataset& d, int threads) {
  return beeswarm_from_explanations(d, explain_dataset(f, d, threads));
}

ForceDecomposition force_decomposition(const Forest& f, std::span<const double> x) {
  const ShapExplanation e = forest_shap(f, x);
  ForceDecomposition fd;
  fd.base_value = e.base_value;
  fd.prediction = e.prediction;
  for (std::size_t i = 0; i < e.contributions.size(); ++i)
    if (e.contributions[i] != 0.0)
      fd.entries.push_back({f.schema.at(i).name, e.contributions[i]});
  std::stable_sort(fd.entries.begin(), fd.entries.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a.contribution), mb = std::abs(b.contribution);
    if (ma != mb) return ma > mb;
    return a.feature < b.feature;
  });
  return fd;
}

std::string importance_csv(const std::vector<ImportanceRow>& rows) {
  std::string out = "feature,mean_abs_shap,rank\n";
  for (const auto& r : rows)
    out += r.feature + "," + format_double(r.mean_abs_shap) + "," + std::to_string(r.rank) + "\n";
  return out;
}

std::string beeswarm_csv(const std::vector<BeeswarmRecord>& records) {
  std::string out = "sample_id,feature,value,shap\n";
  for (const auto& r : records)
    out += r.sample_id + "," + r.feature + "," + format_double(r.value) + "," +
           format_double(r.shap) + "\n";
  return out;
}

std::vector<BeeswarmRecord> parse_beeswarm_csv(std::string_view text) {
  std::vector<BeeswarmRecord> records;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    std::string_view line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = pos + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "sample_id,feature,value,shap")
        throw std::runtime_error("beeswarm csv: unexpected header");
      continue;
    }
    std::vector<std::string> fields;
    std::size_t fstart = 0;
    const std::string row(line);
    while (true) {
      const std::size_t comma = row.find(',', fstart);
      if (comma == std::string::npos) {
        fields.push_back(row.substr(fstart));
        break;
      }
      fields.push_back(row.substr(fstart, comma - fstart));
      fstart = comma + 1;
    }
    if (fields.size() != 4)
      throw std::runtime_error("beeswarm csv: row " + std::to_string(line_no) +
                               " has wrong field count");
    records.push_back({fields[0], fields[1],
                       parse_double(fields[2], "beeswarm csv: value"),
                       parse_double(fields[3], "beeswarm csv: shap")});
  }
  return records;
}

std::string force_csv(const ForceDecomposition& fd) {
  std::string out = "# base_value=" + format_double(fd.base_value) + "\n";
  out += "# prediction=" + format_double(fd.prediction) + "\n";
  out += "feature,contribution\n";
  for (const auto& e : fd.entries) out += e.feature + "," + format_double(e.contribution) + "\n";
  return out;
}

}  // namespace firemap
