#pragma once

// Multi-layer perceptron with one ReLU hidden layer and a sigmoid output,
// trained with mini-batch Adam on cross-entropy plus L2 on the weight
// matrices.  Parameters flatten as [w1 (hidden x input, row-major), b1,
// w2, b2] for the optimizer and the finite-difference checks.

#include <vector>

#include "nate/model.hpp"

namespace nate {

inline double relu(double x) { return x > 0 ? x : 0.0; }

struct MlpModel {
  int input = 0;
  int hidden = 0;
  std::vector<double> w1;  // hidden x input
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
  Standardizer standardizer;

  size_t param_count() const {
    return w1.size() + b1.size() + w2.size() + 1;
  }

  std::vector<double> flatten() const {
    std::vector<double> p;
    p.reserve(param_count());
    p.insert(p.end(), w1.begin(), w1.end());
    p.insert(p.end(), b1.begin(), b1.end());
    p.insert(p.end(), w2.begin(), w2.end());
    p.push_back(b2);
    return p;
  }

  void unflatten(const std::vector<double>& p) {
    size_t at = 0;
    for (auto& v : w1) v = p[at++];
    for (auto& v : b1) v = p[at++];
    for (auto& v : w2) v = p[at++];
    b2 = p[at++];
  }
};

namespace detail {

// Forward pass on an already standardized input; fills z1 (pre-activation)
// and h (post-ReLU), returns the output logit.
inline double mlp_forward(const MlpModel& m, const std::vector<double>& x,
                          std::vector<double>& z1, std::vector<double>& h) {
  z1.assign(m.hidden, 0.0);
  h.assign(m.hidden, 0.0);
  for (int j = 0; j < m.hidden; ++j) {
    double z = m.b1[j];
    const double* row = &m.w1[static_cast<size_t>(j) * m.input];
    for (int i = 0; i < m.input; ++i) z += row[i] * x[i];
    z1[j] = z;
    h[j] = relu(z);
  }
  double z = m.b2;
  for (int j = 0; j < m.hidden; ++j) z += m.w2[j] * h[j];
  return z;
}

}  // namespace detail

inline double eval_mlp(const MlpModel& m, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != m.input)
    throw DimensionMismatchError(m.input, v.size());
  std::vector<double> x = m.standardizer.apply(v);
  std::vector<double> z1, h;
  return sigmoid(detail::mlp_forward(m, x, z1, h));
}

inline double mlp_loss(const MlpModel& m,
                       const std::vector<std::vector<double>>& xs,
                       const std::vector<char>& ys, double l2) {
  double loss = 0.0;
  std::vector<double> z1, h;
  for (size_t r = 0; r < xs.size(); ++r)
    loss += logit_ce(detail::mlp_forward(m, xs[r], z1, h), ys[r]);
  if (!xs.empty()) loss /= xs.size();
  double reg = 0.0;
  for (double w : m.w1) reg += w * w;
  for (double w : m.w2) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

// Analytic gradient of mlp_loss in flattened parameter order.  ReLU's
// derivative at exactly zero is taken as zero.
inline std::vector<double> mlp_gradient(
    const MlpModel& m, const std::vector<std::vector<double>>& xs,
    const std::vector<char>& ys, double l2) {
  std::vector<double> gw1(m.w1.size(), 0.0), gb1(m.b1.size(), 0.0),
      gw2(m.w2.size(), 0.0);
  double gb2 = 0.0;
  std::vector<double> z1, h;
  for (size_t r = 0; r < xs.size(); ++r) {
    double z = detail::mlp_forward(m, xs[r], z1, h);
    double delta = sigmoid(z) - (ys[r] ? 1.0 : 0.0);
    for (int j = 0; j < m.hidden; ++j) {
      gw2[j] += delta * h[j];
      double dz1 = z1[j] > 0 ? delta * m.w2[j] : 0.0;
      gb1[j] += dz1;
      if (dz1 != 0.0) {
        double* grow = &gw1[static_cast<size_t>(j) * m.input];
        for (int i = 0; i < m.input; ++i) grow[i] += dz1 * xs[r][i];
      }
    }
    gb2 += delta;
  }
  double inv = xs.empty() ? 0.0 : 1.0 / xs.size();
  for (auto& v : gw1) v *= inv;
  for (auto& v : gb1) v *= inv;
  for (auto& v : gw2) v *= inv;
  gb2 *= inv;
  for (size_t i = 0; i < gw1.size(); ++i) gw1[i] += l2 * m.w1[i];
  for (size_t i = 0; i < gw2.size(); ++i) gw2[i] += l2 * m.w2[i];

  std::vector<double> g;
  g.reserve(m.param_count());
  g.insert(g.end(), gw1.begin(), gw1.end());
  g.insert(g.end(), gb1.begin(), gb1.end());
  g.insert(g.end(), gw2.begin(), gw2.end());
  g.push_back(gb2);
  return g;
}

// He-style initialization, seeded.
inline MlpModel init_mlp(int input, int hidden, uint64_t seed) {
  MlpModel m;
  m.input = input;
  m.hidden = hidden;
  m.w1.assign(static_cast<size_t>(hidden) * input, 0.0);
  m.b1.assign(hidden, 0.0);
  m.w2.assign(hidden, 0.0);
  RngEngine rng(seed);
  double s1 = std::sqrt(2.0 / std::max(1, input));
  double s2 = std::sqrt(2.0 / std::max(1, hidden));
  for (auto& w : m.w1) w = s1 * rng_normal(rng);
  for (auto& w : m.w2) w = s2 * rng_normal(rng);
  return m;
}

inline MlpModel train_mlp(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) throw EmptyDatasetError();

  MlpModel m = init_mlp(data.width(), cfg.hidden_units,
                        derive_seed(cfg.seed, 0x6d6c70));
  m.standardizer = Standardizer::fit(data, cfg.standardize_columns);
  std::vector<std::vector<double>> xs(data.size());
  for (size_t i = 0; i < data.size(); ++i)
    xs[i] = m.standardizer.apply(data.x[i]);

  Adam adam(m.param_count(), cfg);
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
      std::vector<double> g = mlp_gradient(m, bx, by, cfg.l2);
      std::vector<double> params = m.flatten();
      adam.step(params, g);
      m.unflatten(params);
    }
  }
  return m;
}

}  // namespace nate
