#pragma once

// CART decision tree: greedy binary splits `v[j] <= t` chosen by Gini
// impurity decrease.  A node is expanded while its own impurity exceeds the
// impurity threshold and any valid split exists (so zero-decrease splits are
// taken when the node is still impure, which is what lets XOR-shaped data
// train to purity); ties resolve to the lowest feature index, then the
// lowest threshold.  Leaves carry the fraction of blame-labeled training
// samples that reached them, which is the confidence that comes out of
// eval.

#include <algorithm>
#include <vector>

#include "nate/model.hpp"

namespace nate {

struct TreeNode {
  int feature = -1;  // -1: leaf
  double threshold = 0.0;
  int32_t left = -1, right = -1;
  double p_true = 0.0;
  uint32_t count = 0;
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;
  Standardizer standardizer;
};

inline double eval_tree(const DecisionTreeModel& m,
                        const std::vector<double>& v) {
  std::vector<double> x = m.standardizer.apply(v);
  int at = 0;
  for (;;) {
    const TreeNode& n = m.nodes[at];
    if (n.feature < 0) return n.p_true;
    if (static_cast<size_t>(n.feature) >= x.size())
      throw DimensionMismatchError(n.feature + 1, x.size());
    at = x[n.feature] <= n.threshold ? n.left : n.right;
  }
}

namespace detail {

inline double gini(size_t pos, size_t n) {
  if (n == 0) return 0.0;
  double p = static_cast<double>(pos) / n;
  return 2.0 * p * (1.0 - p);
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = -1.0;
};

// rows: indices into xs/ys.  `features` are the candidate feature indices
// for this node, in ascending order.
inline SplitChoice best_split(const std::vector<std::vector<double>>& xs,
                              const std::vector<char>& ys,
                              const std::vector<int>& rows,
                              const std::vector<int>& features) {
  size_t n = rows.size();
  size_t pos = 0;
  for (int r : rows) pos += ys[r] ? 1 : 0;
  double parent = gini(pos, n);

  SplitChoice best;
  std::vector<std::pair<double, char>> vals;
  for (int f : features) {
    vals.clear();
    vals.reserve(n);
    for (int r : rows) vals.emplace_back(xs[r][f], ys[r]);
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (vals.front().first == vals.back().first) continue;  // constant
    size_t left_n = 0, left_pos = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
      ++left_n;
      left_pos += vals[i].second ? 1 : 0;
      if (vals[i].first == vals[i + 1].first) continue;
      double thr = vals[i].first + 0.5 * (vals[i + 1].first - vals[i].first);
      double weighted =
          (left_n * gini(left_pos, left_n) +
           (n - left_n) * gini(pos - left_pos, n - left_n)) /
          n;
      double decrease = parent - weighted;
      if (decrease > best.decrease) {
        best.feature = f;
        best.threshold = thr;
        best.decrease = decrease;
      }
    }
  }
  return best;
}

// Core builder shared by the single tree and the forest.  When
// `subsample_k > 0`, each node considers a seeded random subset of that many
// features.
inline std::vector<TreeNode> build_tree(
    const std::vector<std::vector<double>>& xs, const std::vector<char>& ys,
    std::vector<int> root_rows, double impurity_threshold, int subsample_k,
    RngEngine* rng) {
  std::vector<TreeNode> nodes;
  int width = xs.empty() ? 0 : static_cast<int>(xs[0].size());
  std::vector<int> all_features(width);
  for (int i = 0; i < width; ++i) all_features[i] = i;

  struct Item {
    std::vector<int> rows;
    int index;
  };
  std::vector<Item> stack;
  nodes.emplace_back();
  stack.push_back({std::move(root_rows), 0});

  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    size_t n = item.rows.size();
    size_t pos = 0;
    for (int r : item.rows) pos += ys[r] ? 1 : 0;
    nodes[item.index].count = static_cast<uint32_t>(n);
    nodes[item.index].p_true = n == 0 ? 0.0 : static_cast<double>(pos) / n;

    if (gini(pos, n) <= impurity_threshold) continue;  // pure enough: leaf

    std::vector<int> cand;
    if (subsample_k > 0 && subsample_k < width && rng) {
      std::vector<int> pool = all_features;
      for (int i = 0; i < subsample_k; ++i) {
        size_t j = i + rng_below(*rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
      }
      cand.assign(pool.begin(), pool.begin() + subsample_k);
      std::sort(cand.begin(), cand.end());
    } else {
      cand = all_features;
    }

    SplitChoice split = detail::best_split(xs, ys, item.rows, cand);
    if (split.feature < 0) continue;  // nothing separates the rows: leaf

    std::vector<int> left, right;
    for (int r : item.rows)
      (xs[r][split.feature] <= split.threshold ? left : right).push_back(r);
    int32_t left_idx = static_cast<int32_t>(nodes.size());
    nodes.emplace_back();
    int32_t right_idx = static_cast<int32_t>(nodes.size());
    nodes.emplace_back();
    nodes[item.index].feature = split.feature;
    nodes[item.index].threshold = split.threshold;
    nodes[item.index].left = left_idx;
    nodes[item.index].right = right_idx;
    stack.push_back({std::move(right), right_idx});
    stack.push_back({std::move(left), left_idx});
  }
  return nodes;
}

}  // namespace detail

inline DecisionTreeModel train_tree(const Dataset& data,
                                    const TrainConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) throw EmptyDatasetError();
  DecisionTreeModel m;
  m.standardizer = Standardizer::fit(data, cfg.standardize_columns);
  std::vector<std::vector<double>> xs(data.size());
  for (size_t i = 0; i < data.size(); ++i)
    xs[i] = m.standardizer.apply(data.x[i]);
  std::vector<int> rows(data.size());
  for (size_t i = 0; i < data.size(); ++i) rows[i] = static_cast<int>(i);
  m.nodes = detail::build_tree(xs, data.y, std::move(rows),
                               cfg.impurity_threshold, 0, nullptr);
  return m;
}

}  // namespace nate
