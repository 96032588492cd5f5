#include <cmath>

#include "doctest.h"
#include "firemap/shap.hpp"
#include "helpers.hpp"

using namespace firemap;
using namespace firemap::testing;

namespace {

// Random tree with valid covers: leaves draw cover in [1,20], internal
// nodes sum their children.
int random_subtree(Tree& t, Rng& rng, int depth, int max_depth, int n_features) {
  const int index = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (depth >= max_depth || rng.uniform() < 0.3) {
    t.nodes[index].value = rng.uniform();
    t.nodes[index].cover = 1 + static_cast<std::int64_t>(rng.uniform_below(20));
    return index;
  }
  const int feature = static_cast<int>(rng.uniform_below(n_features));
  const double threshold = 2.0 * rng.uniform() - 1.0;
  const int left = random_subtree(t, rng, depth + 1, max_depth, n_features);
  const int right = random_subtree(t, rng, depth + 1, max_depth, n_features);
  t.nodes[index].feature = feature;
  t.nodes[index].threshold = threshold;
  t.nodes[index].left = left;
  t.nodes[index].right = right;
  t.nodes[index].cover = t.nodes[left].cover + t.nodes[right].cover;
  return index;
}

Tree random_tree(Rng& rng, int max_depth, int n_features) {
  Tree t;
  random_subtree(t, rng, 0, max_depth, n_features);
  if (t.nodes.size() == 1 && t.nodes[0].is_leaf()) {
    // ensure at least one split so the case is non-trivial
    t = Tree{};
    const int feature = static_cast<int>(rng.uniform_below(n_features));
    TreeNode root;
    root.feature = feature;
    root.threshold = 2.0 * rng.uniform() - 1.0;
    root.left = 1;
    root.right = 2;
    t.nodes = {root, TreeNode{}, TreeNode{}};
    t.nodes[1].value = rng.uniform();
    t.nodes[1].cover = 1 + static_cast<std::int64_t>(rng.uniform_below(20));
    t.nodes[2].value = rng.uniform();
    t.nodes[2].cover = 1 + static_cast<std::int64_t>(rng.uniform_below(20));
    t.nodes[0].cover = t.nodes[1].cover + t.nodes[2].cover;
  }
  return t;
}

}  // namespace

TEST_CASE("tree_expected_value") {
  const Tree t = stump(0, 0.0, 0.2, 0.8);  // covers 2/2

  SUBCASE("nothing known: cover-weighted mean of leaves") {
    CHECK(tree_expected_value(t, std::vector<double>{-1.0}, {false}) == doctest::Approx(0.5));
  }
  SUBCASE("feature known: plain traversal") {
    CHECK(tree_expected_value(t, std::vector<double>{-1.0}, {true}) == doctest::Approx(0.2));
    CHECK(tree_expected_value(t, std::vector<double>{1.0}, {true}) == doctest::Approx(0.8));
  }
  SUBCASE("single leaf ignores the subset") {
    const Tree leaf = single_leaf(0.7);
    CHECK(tree_expected_value(leaf, std::vector<double>{0.0}, {false}) == doctest::Approx(0.7));
    CHECK(tree_expected_value(leaf, std::vector<double>{0.0}, {true}) == doctest::Approx(0.7));
  }
  SUBCASE("uneven covers weight the children") {
    const Tree uneven = stump(0, 0.0, 0.0, 1.0, 3, 1);
    CHECK(tree_expected_value(uneven, std::vector<double>{0.0}, {false}) ==
          doctest::Approx(0.25));
  }
}

TEST_CASE("brute_force_shap hand cases") {
  SUBCASE("single leaf: all contributions zero") {
    const auto e = brute_force_shap(single_leaf(0.7), std::vector<double>{1.0, 2.0});
    CHECK(e.base_value == doctest::Approx(0.7));
    CHECK(e.prediction == doctest::Approx(0.7));
    for (double phi : e.contributions) CHECK(phi == 0.0);
  }
  SUBCASE("depth-1 tree, x going left: phi0 = -0.3") {
    const auto e = brute_force_shap(stump(0, 0.0, 0.2, 0.8), std::vector<double>{-1.0});
    CHECK(e.base_value == doctest::Approx(0.5));
    CHECK(e.prediction == doctest::Approx(0.2));
    CHECK(e.contributions[0] == doctest::Approx(-0.3));
  }
  SUBCASE("feature never split on has phi exactly zero") {
    const auto e = brute_force_shap(stump(0, 0.0, 0.2, 0.8), std::vector<double>{-1.0, 9.0});
    CHECK(e.contributions[0] == doctest::Approx(-0.3));
    CHECK(e.contributions[1] == 0.0);
  }
  SUBCASE("feature cap") {
    std::vector<double> x(16, 0.0);
    CHECK_THROWS_AS(brute_force_shap(single_leaf(0.5), x), std::invalid_argument);
  }
}

TEST_CASE("tree_shap matches the three brute-force hand cases") {
  {
    const auto e = tree_shap(single_leaf(0.7), std::vector<double>{1.0, 2.0});
    CHECK(e.base_value == doctest::Approx(0.7));
    for (double phi : e.contributions) CHECK(phi == doctest::Approx(0.0));
  }
  {
    const auto e = tree_shap(stump(0, 0.0, 0.2, 0.8), std::vector<double>{-1.0});
    CHECK(e.contributions[0] == doctest::Approx(-0.3).epsilon(1e-12));
  }
  {
    const auto e = tree_shap(stump(0, 0.0, 0.2, 0.8), std::vector<double>{-1.0, 9.0});
    CHECK(e.contributions[1] == doctest::Approx(0.0));
  }
}

TEST_CASE("oracle sweep: tree_shap equals brute_force_shap on random trees") {
  Rng rng(2024);
  const int n_features = 8;
  int cases = 0;
  double max_diff = 0.0;
  double max_efficiency_gap = 0.0;
  while (cases < 120) {
    const Tree t = random_tree(rng, 4, n_features);
    std::vector<double> x(n_features);
    for (double& v : x) v = 2.0 * rng.uniform() - 1.0;

    const auto fast = tree_shap(t, x);
    const auto brute = brute_force_shap(t, x);
    for (int j = 0; j < n_features; ++j)
      max_diff = std::max(max_diff, std::abs(fast.contributions[j] - brute.contributions[j]));

    double sum = fast.base_value;
    for (double phi : fast.contributions) sum += phi;
    max_efficiency_gap = std::max(max_efficiency_gap, std::abs(sum - fast.prediction));

    // dummy axiom: untouched features get exactly zero
    std::vector<bool> used(n_features, false);
    for (const TreeNode& node : t.nodes)
      if (!node.is_leaf()) used[node.feature] = true;
    for (int j = 0; j < n_features; ++j)
      if (!used[j]) CHECK(fast.contributions[j] == 0.0);

    ++cases;
  }
  CHECK(max_diff <= 1e-9);
  CHECK(max_efficiency_gap <= 1e-9);
}

TEST_CASE("symmetry: duplicated feature columns receive equal attribution") {
  // Value function symmetric in f0/f1 by construction: mirrored covers and
  // leaf values across the two split levels.
  Tree t;
  t.nodes.resize(7);
  t.nodes[0].feature = 0;
  t.nodes[0].threshold = 0.0;
  t.nodes[0].left = 1;
  t.nodes[0].right = 2;
  t.nodes[0].cover = 8;
  t.nodes[1].feature = 1;
  t.nodes[1].threshold = 0.0;
  t.nodes[1].left = 3;
  t.nodes[1].right = 4;
  t.nodes[1].cover = 4;
  t.nodes[2].feature = 1;
  t.nodes[2].threshold = 0.0;
  t.nodes[2].left = 5;
  t.nodes[2].right = 6;
  t.nodes[2].cover = 4;
  t.nodes[3] = TreeNode{};
  t.nodes[3].value = 0.1;
  t.nodes[3].cover = 2;
  t.nodes[4] = TreeNode{};
  t.nodes[4].value = 0.4;
  t.nodes[4].cover = 2;
  t.nodes[5] = TreeNode{};
  t.nodes[5].value = 0.4;
  t.nodes[5].cover = 2;
  t.nodes[6] = TreeNode{};
  t.nodes[6].value = 0.9;
  t.nodes[6].cover = 2;

  for (double v : {-0.5, 0.5}) {
    const auto e = brute_force_shap(t, std::vector<double>{v, v});
    CHECK(e.contributions[0] == doctest::Approx(e.contributions[1]).epsilon(1e-12));
    const auto fast = tree_shap(t, std::vector<double>{v, v});
    CHECK(fast.contributions[0] == doctest::Approx(fast.contributions[1]).epsilon(1e-9));
  }
}

TEST_CASE("forest_shap") {
  SUBCASE("forest of identical trees equals the single-tree explanation") {
    const Tree t = stump(0, 0.0, 0.2, 0.8);
    const Forest f = forest_of({t, t, t}, 1);
    const auto single = tree_shap(t, std::vector<double>{-1.0});
    const auto combined = forest_shap(f, std::vector<double>{-1.0});
    CHECK(combined.base_value == doctest::Approx(single.base_value));
    CHECK(combined.contributions[0] == doctest::Approx(single.contributions[0]));
  }
  SUBCASE("two single-leaf trees: base 0.5, zero contributions") {
    const Forest f = forest_of({single_leaf(0.2), single_leaf(0.8)}, 1);
    const auto e = forest_shap(f, std::vector<double>{0.0});
    CHECK(e.base_value == doctest::Approx(0.5));
    CHECK(e.contributions[0] == 0.0);
    CHECK(e.prediction == doctest::Approx(0.5));
  }
  SUBCASE("linearity and efficiency on a random small forest") {
    Rng rng(5150);
    std::vector<Tree> trees;
    for (int t = 0; t < 6; ++t) trees.push_back(random_tree(rng, 4, 5));
    const Forest f = forest_of(std::move(trees), 5);
    for (int q = 0; q < 25; ++q) {
      std::vector<double> x(5);
      for (double& v : x) v = 2.0 * rng.uniform() - 1.0;
      const auto e = forest_shap(f, x);

      double sum = e.base_value;
      for (double phi : e.contributions) sum += phi;
      CHECK(std::abs(sum - e.prediction) <= 1e-9);
      CHECK(e.prediction == doctest::Approx(predict_proba(f, x)).epsilon(1e-12));

      // mean of per-tree explanations
      for (std::size_t j = 0; j < 5; ++j) {
        double acc = 0.0;
        for (const Tree& t : f.trees) acc += tree_shap(t, x).contributions[j];
        CHECK(e.contributions[j] == doctest::Approx(acc / 6.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("importance_table") {
  const Dataset d = make_dataset({{-1, 5}, {1, 5}, {-2, 5}}, {0, 1, 0});
  const Forest f = forest_of({stump(0, 0.0, 0.1, 0.9)}, 2);

  const auto table = importance_table(f, d);
  REQUIRE(table.size() == 2);
  CHECK(table[0].feature == "f0");
  CHECK(table[0].rank == 1);
  CHECK(table[1].feature == "f1");  // never split on: zero importance, last
  CHECK(table[1].mean_abs_shap == 0.0);
  CHECK(table[1].rank == 2);

  // single sample: table equals |contributions|
  const Dataset one = make_dataset({{-1, 5}}, {0});
  const auto e = forest_shap(f, one[0].values);
  const auto single = importance_table(f, one);
  CHECK(single[0].mean_abs_shap == doctest::Approx(std::abs(e.contributions[0])));

  const Dataset empty(FeatureSchema({{"f0", ""}, {"f1", ""}}), {});
  CHECK_THROWS_AS(importance_table(f, empty), std::invalid_argument);
}

TEST_CASE("beeswarm_export") {
  const Dataset d = make_dataset({{-1, 5, 2}, {1, 4, 3}}, {0, 1});
  const Forest f = forest_of({stump(0, 0.0, 0.1, 0.9)}, 3);

  const auto records = beeswarm_export(f, d);
  CHECK(records.size() == 6);  // n * p

  // records for one sample re-sum to prediction - base
  const auto e = forest_shap(f, d[0].values);
  double sum = 0.0;
  for (const auto& r : records)
    if (r.sample_id == "r0") sum += r.shap;
  CHECK(sum == doctest::Approx(e.prediction - e.base_value).epsilon(1e-9));

  // export -> parse -> aggregate reproduces importance_table
  const auto parsed = parse_beeswarm_csv(beeswarm_csv(records));
  REQUIRE(parsed.size() == records.size());
  const auto table = importance_table(f, d);
  for (const auto& row : table) {
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& r : parsed)
      if (r.feature == row.feature) {
        acc += std::abs(r.shap);
        ++count;
      }
    CHECK(count == d.size());
    CHECK(acc / static_cast<double>(count) == doctest::Approx(row.mean_abs_shap).epsilon(1e-12));
  }
}

TEST_CASE("force_decomposition") {
  SUBCASE("all-zero contributions give an empty list") {
    const Forest f = forest_of({single_leaf(0.42)}, 2);
    const auto fd = force_decomposition(f, std::vector<double>{0.0, 0.0});
    CHECK(fd.entries.empty());
    CHECK(fd.base_value == doctest::Approx(fd.prediction));
  }
  SUBCASE("depth-1 example: single entry (f0, -0.3)") {
    const Forest f = forest_of({stump(0, 0.0, 0.2, 0.8)}, 2);
    const auto fd = force_decomposition(f, std::vector<double>{-1.0, 7.0});
    REQUIRE(fd.entries.size() == 1);
    CHECK(fd.entries[0].feature == "f0");
    CHECK(fd.entries[0].contribution == doctest::Approx(-0.3));
  }
  SUBCASE("entries sorted by |contribution| descending") {
    Rng rng(808);
    std::vector<Tree> trees;
    for (int t = 0; t < 5; ++t) trees.push_back(random_tree(rng, 3, 4));
    const Forest f = forest_of(std::move(trees), 4);
    std::vector<double> x{0.3, -0.2, 0.9, -0.7};
    const auto fd = force_decomposition(f, x);
    for (std::size_t i = 1; i < fd.entries.size(); ++i)
      CHECK(std::abs(fd.entries[i - 1].contribution) >=
            std::abs(fd.entries[i].contribution));
  }
}
