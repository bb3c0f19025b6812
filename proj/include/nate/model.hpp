#pragma once

// Shared training machinery: configuration, dataset layout, the size-column
// standardizer, Adam, and the numerically careful pieces (stable sigmoid and
// cross-entropy).

#include <cmath>
#include <cstdint>
#include <vector>

#include "nate/errors.hpp"
#include "nate/features.hpp"
#include "nate/rng.hpp"

namespace nate {

struct TrainConfig {
  double learning_rate = 0.001;
  double l2 = 0.001;
  int batch_size = 200;
  int epochs = 20;
  uint64_t seed = 0;
  // Adam
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // decision tree
  double impurity_threshold = 1e-7;
  // random forest
  int n_estimators = 30;
  bool feature_subsampling = true;
  // mlp
  int hidden_units = 10;
  // Columns standardized to zero mean / unit variance from training-set
  // statistics (the unbounded size feature; binary columns pass through).
  std::vector<int> standardize_columns;

  void validate() const {
    if (!(learning_rate > 0)) throw InvalidConfigError("learning_rate <= 0");
    if (l2 < 0) throw InvalidConfigError("l2 < 0");
    if (batch_size < 1) throw InvalidConfigError("batch_size < 1");
    if (epochs < 1) throw InvalidConfigError("epochs < 1");
    if (n_estimators < 1) throw InvalidConfigError("n_estimators < 1");
    if (hidden_units < 1) throw InvalidConfigError("hidden_units < 1");
  }
};

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<char> y;

  size_t size() const { return x.size(); }
  int width() const { return x.empty() ? 0 : static_cast<int>(x[0].size()); }

  static Dataset from_samples(const std::vector<Sample>& samples,
                              const FeatureMask& mask) {
    Dataset d;
    d.x.reserve(samples.size());
    d.y.reserve(samples.size());
    for (const auto& s : samples) {
      d.x.push_back(mask.apply(s.values));
      d.y.push_back(s.label ? 1 : 0);
    }
    return d;
  }
};

struct Standardizer {
  std::vector<int> columns;
  std::vector<double> mean, sd;

  static Standardizer fit(const Dataset& d, const std::vector<int>& columns) {
    Standardizer s;
    for (int c : columns) {
      if (c < 0 || c >= d.width()) continue;
      double m = 0;
      for (const auto& row : d.x) m += row[c];
      m /= d.size();
      double var = 0;
      for (const auto& row : d.x) var += (row[c] - m) * (row[c] - m);
      var /= d.size();
      double dev = std::sqrt(var);
      s.columns.push_back(c);
      s.mean.push_back(m);
      s.sd.push_back(dev > 1e-12 ? dev : 1.0);
    }
    return s;
  }

  void apply_in_place(std::vector<double>& v) const {
    for (size_t i = 0; i < columns.size(); ++i)
      v[columns[i]] = (v[columns[i]] - mean[i]) / sd[i];
  }

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> out = v;
    apply_in_place(out);
    return out;
  }
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow
inline double log1p_exp(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Cross-entropy of a single logit against a boolean label.
inline double logit_ce(double z, bool label) {
  return label ? log1p_exp(-z) : log1p_exp(z);
}

class Adam {
 public:
  Adam(size_t n, const TrainConfig& cfg)
      : m_(n, 0.0), v_(n, 0.0), cfg_(cfg) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (size_t i = 0; i < params.size(); ++i) {
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
      double mhat = m_[i] / bc1;
      double vhat = v_[i] / bc2;
      params[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
  }

 private:
  std::vector<double> m_, v_;
  TrainConfig cfg_;
  long long t_ = 0;
};

// Mini-batch index schedule: a seeded shuffle per epoch, fixed batch size,
// last batch possibly short.
inline std::vector<std::vector<int>> batch_schedule(size_t n, int batch_size,
                                                    RngEngine& rng) {
  std::vector<int> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
  rng_shuffle(idx, rng);
  std::vector<std::vector<int>> batches;
  for (size_t at = 0; at < n; at += batch_size) {
    size_t end = std::min(n, at + batch_size);
    batches.emplace_back(idx.begin() + at, idx.begin() + end);
  }
  return batches;
}

}  // namespace nate
