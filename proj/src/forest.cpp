#include "firemap/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "firemap/parallel.hpp"

namespace firemap {

namespace {

constexpr double kGainEps = 1e-12;

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // sum over children of n_c * gini_c, lower is better
};

// n * gini for a binary node: n - (pos^2 + neg^2) / n.
double node_score(double n, double pos) {
  const double neg = n - pos;
  return n - (pos * pos + neg * neg) / n;
}

class TreeBuilder {
 public:
  TreeBuilder(const TrainingData& data, const ForestParams& params, Rng& rng)
      : data_(data), params_(params), rng_(rng) {}

  Tree build(std::span<const std::size_t> rows, std::uint64_t fingerprint) {
    rows_.assign(rows.begin(), rows.end());
    Tree tree;
    tree.schema_fingerprint = fingerprint;
    nodes_ = &tree.nodes;
    grow(0, rows_.size(), 0);
    return tree;
  }

 private:
  int grow(std::size_t begin, std::size_t end, int depth) {
    const std::size_t n = end - begin;
    std::size_t pos = 0;
    for (std::size_t i = begin; i < end; ++i) pos += static_cast<std::size_t>(data_.labels[rows_[i]]);

    const int index = static_cast<int>(nodes_->size());
    nodes_->emplace_back();
    (*nodes_)[index].cover = static_cast<std::int64_t>(n);

    const bool pure = (pos == 0 || pos == n);
    if (pure || depth >= params_.max_depth || n < 2 * static_cast<std::size_t>(params_.min_samples_leaf)) {
      make_leaf(index, n, pos);
      return index;
    }

    const SplitChoice split = best_split(begin, end, n, pos);
    if (!split.found) {
      make_leaf(index, n, pos);
      return index;
    }

    // Partition with the same predicate prediction uses: value <= threshold
    // goes left.
    auto mid_it = std::stable_partition(
        rows_.begin() + begin, rows_.begin() + end,
        [&](std::size_t r) { return data_.value(r, split.feature) <= split.threshold; });
    const std::size_t mid = static_cast<std::size_t>(mid_it - rows_.begin());
    if (mid == begin || mid == end) {
      make_leaf(index, n, pos);  // midpoint collapsed onto a boundary value
      return index;
    }

    (*nodes_)[index].feature = split.feature;
    (*nodes_)[index].threshold = split.threshold;
    const int left = grow(begin, mid, depth + 1);
    (*nodes_)[index].left = left;
    const int right = grow(mid, end, depth + 1);
    (*nodes_)[index].right = right;
    return index;
  }

  void make_leaf(int index, std::size_t n, std::size_t pos) {
    (*nodes_)[index].feature = -1;
    (*nodes_)[index].value = static_cast<double>(pos) / static_cast<double>(n);
  }

  SplitChoice best_split(std::size_t begin, std::size_t end, std::size_t n, std::size_t pos) {
    const double parent = node_score(static_cast<double>(n), static_cast<double>(pos));

    std::size_t mtry = static_cast<std::size_t>(params_.mtry);
    auto candidates = rng_.sample_without_replacement(data_.n_features, mtry);
    std::sort(candidates.begin(), candidates.end());

    SplitChoice best;
    scratch_.clear();
    scratch_.reserve(n);
    for (std::size_t feature : candidates) {
      scratch_.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = rows_[i];
        scratch_.push_back({data_.value(r, feature), data_.labels[r]});
      }
      std::sort(scratch_.begin(), scratch_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double left_n = 0, left_pos = 0;
      const double total_n = static_cast<double>(n);
      const double total_pos = static_cast<double>(pos);
      for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
        left_n += 1.0;
        left_pos += scratch_[i].second;
        if (scratch_[i].first == scratch_[i + 1].first) continue;
        const double right_n = total_n - left_n;
        if (left_n < params_.min_samples_leaf || right_n < params_.min_samples_leaf) continue;
        const double score =
            node_score(left_n, left_pos) + node_score(right_n, total_pos - left_pos);
        if (!best.found || score < best.score - kGainEps) {
          best.found = true;
          best.feature = static_cast<int>(feature);
          best.threshold = 0.5 * (scratch_[i].first + scratch_[i + 1].first);
          best.score = score;
        }
      }
    }
    if (best.found && parent - best.score <= kGainEps) best.found = false;
    return best;
  }

  const TrainingData& data_;
  const ForestParams& params_;
  Rng& rng_;
  std::vector<std::size_t> rows_;
  std::vector<std::pair<double, int>> scratch_;
  std::vector<TreeNode>* nodes_ = nullptr;
};

void check_params(const ForestParams& p, std::size_t n_features) {
  if (p.n_trees < 1) throw std::invalid_argument("ForestParams: n_trees must be >= 1");
  if (p.max_depth < 1) throw std::invalid_argument("ForestParams: max_depth must be >= 1");
  if (p.min_samples_leaf < 1)
    throw std::invalid_argument("ForestParams: min_samples_leaf must be >= 1");
  if (p.mtry < 1 || static_cast<std::size_t>(p.mtry) > n_features)
    throw std::invalid_argument("ForestParams: mtry must be in [1, schema size]");
}

void check_input(const Forest& f, std::span<const double> x) {
  if (x.size() != f.schema.size())
    throw std::invalid_argument("predict: feature vector has " + std::to_string(x.size()) +
                                " values, schema has " + std::to_string(f.schema.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("predict: non-finite input value");
}

}  // namespace

int Tree::max_depth() const {
  if (nodes.empty()) return 0;
  int deepest = 0;
  std::function<void(int, int)> walk = [&](int idx, int depth) {
    deepest = std::max(deepest, depth);
    const TreeNode& node = nodes[idx];
    if (!node.is_leaf()) {
      walk(node.left, depth + 1);
      walk(node.right, depth + 1);
    }
  };
  walk(0, 0);
  return deepest;
}

TrainingData TrainingData::from(const Dataset& d) {
  TrainingData td;
  td.n_rows = d.size();
  td.n_features = d.schema().size();
  td.columns.resize(td.n_rows * td.n_features);
  td.labels.resize(td.n_rows);
  for (std::size_t i = 0; i < td.n_rows; ++i) {
    const Sample& s = d[i];
    td.labels[i] = s.label;
    for (std::size_t j = 0; j < td.n_features; ++j) td.columns[j * td.n_rows + i] = s.values[j];
  }
  return td;
}

Tree train_tree(const TrainingData& data, std::span<const std::size_t> rows,
                const ForestParams& params, Rng& rng, std::uint64_t schema_fingerprint) {
  if (rows.empty()) throw std::invalid_argument("train_tree: empty data");
  check_params(params, data.n_features);
  TreeBuilder builder(data, params, rng);
  return builder.build(rows, schema_fingerprint);
}

Forest train_forest(const Dataset& d, ForestParams params, int threads) {
  if (d.size() < 2) throw std::invalid_argument("train_forest: need at least 2 samples");
  if (params.mtry == 0)
    params.mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d.schema().size()))));
  check_params(params, d.schema().size());

  const double rate = positive_rate(d);
  if (rate == 0.0 || rate == 1.0)
    throw std::invalid_argument(
        "train_forest: single-class dataset; a probability model would be degenerate");

  const TrainingData data = TrainingData::from(d);
  const std::uint64_t fingerprint = d.schema().fingerprint();
  const std::uint64_t tree_root = derive_seed(params.seed, kStreamTree);

  Forest forest{{}, params, d.schema()};
  forest.trees.resize(params.n_trees);

  parallel_for(static_cast<std::size_t>(params.n_trees), threads, [&](std::size_t t) {
    Rng rng(derive_seed(tree_root, t));
    std::vector<std::size_t> rows(data.n_rows);
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_below(data.n_rows));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    forest.trees[t] = train_tree(data, rows, params, rng, fingerprint);
  });
  return forest;
}

double tree_predict(const Tree& t, std::span<const double> x) {
  int idx = 0;
  while (!t.nodes[idx].is_leaf()) {
    const TreeNode& node = t.nodes[idx];
    idx = (x[node.feature] <= node.threshold) ? node.left : node.right;
  }
  return t.nodes[idx].value;
}

double predict_proba(const Forest& f, std::span<const double> x) {
  check_input(f, x);
  double sum = 0.0;
  for (const Tree& t : f.trees) sum += tree_predict(t, x);
  return sum / static_cast<double>(f.trees.size());
}

int predict_label(const Forest& f, std::span<const double> x, double threshold) {
  if (threshold < 0.0 || threshold > 1.0)
    throw std::invalid_argument("predict_label: threshold must be in [0,1]");
  return predict_proba(f, x) >= threshold ? 1 : 0;
}

std::string write_forest(const Forest& f) {
  std::string out = "firemap forest 1\n";
  out += "schema " + std::to_string(f.schema.size()) + "\n";
  for (const auto& feat : f.schema.features())
    out += "feature " + feat.name + " " + (feat.unit.empty() ? "-" : feat.unit) + "\n";
  out += "params trees=" + std::to_string(f.params.n_trees) +
         " max_depth=" + std::to_string(f.params.max_depth) +
         " min_leaf=" + std::to_string(f.params.min_samples_leaf) +
         " mtry=" + std::to_string(f.params.mtry) +
         " bootstrap=" + std::to_string(f.params.bootstrap ? 1 : 0) +
         " seed=" + std::to_string(f.params.seed) + "\n";
  for (std::size_t t = 0; t < f.trees.size(); ++t) {
    const Tree& tree = f.trees[t];
    out += "tree " + std::to_string(t) + " " + std::to_string(tree.nodes.size()) + "\n";
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) {
        out += "leaf " + format_double(node.value) + " " + std::to_string(node.cover) + "\n";
      } else {
        out += "split " + std::to_string(node.feature) + " " + format_double(node.threshold) +
               " " + std::to_string(node.left) + " " + std::to_string(node.right) + " " +
               std::to_string(node.cover) + "\n";
      }
    }
  }
  out += "end\n";
  return out;
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

long long to_int(const std::string& s, const char* what) {
  try {
    return std::stoll(s);
  } catch (...) {
    throw std::runtime_error(std::string("forest file: bad ") + what + " '" + s + "'");
  }
}

}  // namespace

Forest read_forest(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line)) throw std::runtime_error("forest file: unexpected end of input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (next_line() != "firemap forest 1")
    throw std::runtime_error("forest file: bad magic line");

  auto schema_tokens = tokens_of(next_line());
  if (schema_tokens.size() != 2 || schema_tokens[0] != "schema")
    throw std::runtime_error("forest file: expected schema line");
  const std::size_t n_features = static_cast<std::size_t>(to_int(schema_tokens[1], "schema size"));

  std::vector<Feature> features;
  for (std::size_t i = 0; i < n_features; ++i) {
    auto toks = tokens_of(next_line());
    if (toks.size() != 3 || toks[0] != "feature")
      throw std::runtime_error("forest file: expected feature line");
    features.push_back({toks[1], toks[2] == "-" ? std::string() : toks[2]});
  }
  FeatureSchema schema(std::move(features));

  auto params_tokens = tokens_of(next_line());
  if (params_tokens.empty() || params_tokens[0] != "params")
    throw std::runtime_error("forest file: expected params line");
  ForestParams params;
  for (std::size_t i = 1; i < params_tokens.size(); ++i) {
    const std::string& kv = params_tokens[i];
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error("forest file: bad params token " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "trees") params.n_trees = static_cast<int>(to_int(value, "trees"));
    else if (key == "max_depth") params.max_depth = static_cast<int>(to_int(value, "max_depth"));
    else if (key == "min_leaf") params.min_samples_leaf = static_cast<int>(to_int(value, "min_leaf"));
    else if (key == "mtry") params.mtry = static_cast<int>(to_int(value, "mtry"));
    else if (key == "bootstrap") params.bootstrap = to_int(value, "bootstrap") != 0;
    else if (key == "seed") params.seed = static_cast<std::uint64_t>(std::stoull(value));
    else throw std::runtime_error("forest file: unknown params key " + key);
  }

  Forest forest{{}, params, schema};
  const std::uint64_t fingerprint = schema.fingerprint();
  for (int t = 0; t < params.n_trees; ++t) {
    auto head = tokens_of(next_line());
    if (head.size() != 3 || head[0] != "tree" || to_int(head[1], "tree index") != t)
      throw std::runtime_error("forest file: expected header for tree " + std::to_string(t));
    const std::size_t n_nodes = static_cast<std::size_t>(to_int(head[2], "node count"));
    Tree tree;
    tree.schema_fingerprint = fingerprint;
    tree.nodes.reserve(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
      auto toks = tokens_of(next_line());
      TreeNode node;
      if (!toks.empty() && toks[0] == "leaf" && toks.size() == 3) {
        node.value = parse_double(toks[1], "forest file: leaf value");
        node.cover = to_int(toks[2], "cover");
      } else if (!toks.empty() && toks[0] == "split" && toks.size() == 6) {
        node.feature = static_cast<int>(to_int(toks[1], "feature index"));
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= n_features)
          throw std::runtime_error("forest file: feature index out of range");
        node.threshold = parse_double(toks[2], "forest file: threshold");
        node.left = static_cast<int>(to_int(toks[3], "left child"));
        node.right = static_cast<int>(to_int(toks[4], "right child"));
        node.cover = to_int(toks[5], "cover");
      } else {
        throw std::runtime_error("forest file: bad node line '" + line + "'");
      }
      tree.nodes.push_back(node);
    }
    forest.trees.push_back(std::move(tree));
  }
  if (next_line() != "end") throw std::runtime_error("forest file: missing end marker");
  return forest;
}

Forest read_forest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open forest file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_forest(buf.str());
}

void write_forest_file(const Forest& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write forest file '" + path + "'");
  out << write_forest(f);
}

}  // namespace firemap
