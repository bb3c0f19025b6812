#pragma once

// Logistic regression: Pr(b=1|v) = sigmoid(w.v + b), trained with mini-batch
// Adam on cross-entropy plus an L2 penalty (l2/2)*|w|^2 on the weights (the
// bias is not penalized).

#include <vector>

#include "nate/model.hpp"

namespace nate {

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  Standardizer standardizer;
};

inline double eval_logistic(const LogisticModel& m,
                            const std::vector<double>& v) {
  if (v.size() != m.weights.size())
    throw DimensionMismatchError(m.weights.size(), v.size());
  std::vector<double> x = m.standardizer.apply(v);
  double z = m.bias;
  for (size_t i = 0; i < x.size(); ++i) z += m.weights[i] * x[i];
  return sigmoid(z);
}

// Gradient of the regularized batch loss with respect to [weights..., bias].
// Inputs are assumed already standardized (training-internal layout).
inline std::vector<double> gradient_logistic(
    const LogisticModel& m, const std::vector<std::vector<double>>& xs,
    const std::vector<char>& ys, double l2) {
  size_t d = m.weights.size();
  std::vector<double> g(d + 1, 0.0);
  for (size_t r = 0; r < xs.size(); ++r) {
    double z = m.bias;
    for (size_t i = 0; i < d; ++i) z += m.weights[i] * xs[r][i];
    double delta = sigmoid(z) - (ys[r] ? 1.0 : 0.0);
    for (size_t i = 0; i < d; ++i) g[i] += delta * xs[r][i];
    g[d] += delta;
  }
  double inv = xs.empty() ? 0.0 : 1.0 / xs.size();
  for (auto& v : g) v *= inv;
  for (size_t i = 0; i < d; ++i) g[i] += l2 * m.weights[i];
  return g;
}

inline double logistic_loss(const LogisticModel& m,
                            const std::vector<std::vector<double>>& xs,
                            const std::vector<char>& ys, double l2) {
  double loss = 0.0;
  size_t d = m.weights.size();
  for (size_t r = 0; r < xs.size(); ++r) {
    double z = m.bias;
    for (size_t i = 0; i < d; ++i) z += m.weights[i] * xs[r][i];
    loss += logit_ce(z, ys[r]);
  }
  if (!xs.empty()) loss /= xs.size();
  double reg = 0.0;
  for (double w : m.weights) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

inline LogisticModel train_logistic(const Dataset& data,
                                    const TrainConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) throw EmptyDatasetError();

  LogisticModel m;
  m.standardizer = Standardizer::fit(data, cfg.standardize_columns);
  std::vector<std::vector<double>> xs(data.size());
  for (size_t i = 0; i < data.size(); ++i)
    xs[i] = m.standardizer.apply(data.x[i]);

  size_t d = data.width();
  m.weights.assign(d, 0.0);
  Adam adam(d + 1, cfg);
  RngEngine rng(cfg.seed);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& batch : batch_schedule(data.size(), cfg.batch_size, rng)) {
      std::vector<std::vector<double>> bx;
      std::vector<char> by;
      bx.reserve(batch.size());
      by.reserve(batch.size());
      for (int i : batch) {
        bx.push_back(xs[i]);
        by.push_back(data.y[i]);
      }
      std::vector<double> g = gradient_logistic(m, bx, by, cfg.l2);
      std::vector<double> params = m.weights;
      params.push_back(m.bias);
      adam.step(params, g);
      m.bias = params.back();
      params.pop_back();
      m.weights = std::move(params);
    }
  }
  return m;
}

}  // namespace nate
