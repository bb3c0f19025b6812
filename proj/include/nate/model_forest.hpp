#pragma once

// Random forest: n_estimators CART trees, each trained on a bootstrap sample
// of the data (same size, drawn with replacement) and, unless disabled,
// restricted to ceil(sqrt(width)) random candidate features per node.  The
// confidence is the fraction of trees voting blame.

#include <cmath>
#include <vector>

#include "nate/model_tree.hpp"

namespace nate {

struct RandomForestModel {
  std::vector<DecisionTreeModel> trees;
  std::vector<uint64_t> seeds;
};

inline double eval_forest(const RandomForestModel& m,
                          const std::vector<double>& v) {
  size_t votes = 0;
  for (const auto& t : m.trees) votes += eval_tree(t, v) > 0.5 ? 1 : 0;
  return static_cast<double>(votes) / m.trees.size();
}

inline RandomForestModel train_forest(const Dataset& data,
                                      const TrainConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) throw EmptyDatasetError();

  Standardizer standardizer =
      Standardizer::fit(data, cfg.standardize_columns);
  std::vector<std::vector<double>> xs(data.size());
  for (size_t i = 0; i < data.size(); ++i)
    xs[i] = standardizer.apply(data.x[i]);

  int width = data.width();
  int subsample_k =
      cfg.feature_subsampling
          ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(width))))
          : 0;

  RandomForestModel forest;
  for (int t = 0; t < cfg.n_estimators; ++t) {
    uint64_t seed = derive_seed(cfg.seed, static_cast<uint64_t>(t));
    forest.seeds.push_back(seed);
    RngEngine rng(seed);
    std::vector<int> rows(data.size());
    for (auto& r : rows)
      r = static_cast<int>(rng_below(rng, data.size()));
    DecisionTreeModel tree;
    tree.standardizer = standardizer;
    tree.nodes = detail::build_tree(xs, data.y, std::move(rows),
                                    cfg.impurity_threshold, subsample_k, &rng);
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace nate
