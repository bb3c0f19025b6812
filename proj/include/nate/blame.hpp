#pragma once

// Ranked blame prediction: extract one feature vector per candidate node of
// an ill-typed program, score each with the model's confidence, and return
// the top k (highest confidence first, ties to the lower pre-order id).
// Plus the two reference baselines: a seeded random choice from the slice
// and the first inconsistent constraint.

#include <algorithm>
#include <vector>

#include "nate/features.hpp"
#include "nate/model_io.hpp"
#include "nate/rng.hpp"
#include "nate/slice.hpp"

namespace nate {

struct BlameEntry {
  int node = -1;
  Span span;
  double confidence = 0.0;
};

struct BlameReport {
  std::vector<BlameEntry> entries;  // descending confidence, <= k of them
  int k = 3;
};

namespace detail {

inline BlameReport rank_entries(std::vector<BlameEntry> entries, int k) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const BlameEntry& a, const BlameEntry& b) {
                     if (a.confidence != b.confidence)
                       return a.confidence > b.confidence;
                     return a.node < b.node;
                   });
  if (static_cast<int>(entries.size()) > k) entries.resize(k);
  BlameReport r;
  r.entries = std::move(entries);
  r.k = k;
  return r;
}

}  // namespace detail

// Scores precomputed (unfiltered) samples; slice filtering selects on the
// in-slice column so extraction can be shared between configurations.
inline BlameReport blame_samples(const AnyModel& model, const Program& p,
                                 const std::vector<Sample>& samples,
                                 bool filter_slice, int k) {
  static const int slice_col = schema().index_of("in-slice");
  std::vector<BlameEntry> entries;
  for (const auto& s : samples) {
    if (filter_slice && s.values[slice_col] == 0.0) continue;
    entries.push_back(
        {s.node, p.at(s.node).span, model.eval_full(s.values)});
  }
  return detail::rank_entries(std::move(entries), k);
}

inline BlameReport blame(const AnyModel& model, const Program& p, int k = 3,
                         bool filter_slice = true,
                         const SliceConfig& slice_cfg = SliceConfig{}) {
  PartialDerivation deriv = infer_partial(p);
  if (deriv.well_typed) throw NotIllTypedError();
  auto slices = minimal_slices(p, slice_cfg);
  auto samples = extract_program(p, deriv, slices, {}, /*filter=*/false);
  return blame_samples(model, p, samples, filter_slice, k);
}

// k distinct uniform draws from the slice-node union, seeded.
inline BlameReport baseline_random_from(const Program& p,
                                        const std::vector<int>& slice_nodes,
                                        uint64_t seed, int k = 3) {
  std::vector<int> pool = slice_nodes;
  RngEngine rng(seed);
  BlameReport r;
  r.k = k;
  int n = std::min<int>(k, static_cast<int>(pool.size()));
  for (int i = 0; i < n; ++i) {
    size_t j = i + rng_below(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
    r.entries.push_back({pool[i], p.at(pool[i]).span,
                         1.0 - static_cast<double>(i) / (k + 1)});
  }
  return r;
}

inline BlameReport baseline_random(const Program& p, uint64_t seed, int k = 3,
                                   const SliceConfig& slice_cfg = SliceConfig{}) {
  if (infer_partial(p).well_typed) throw NotIllTypedError();
  auto slices = minimal_slices(p, slice_cfg);
  std::set<int> u;
  for (const auto& s : slices) u.insert(s.nodes.begin(), s.nodes.end());
  return baseline_random_from(p, {u.begin(), u.end()}, seed, k);
}

// The compiler-style baseline: the origin of the first failed equation.
inline BlameReport baseline_first_error(const Program& p) {
  PartialDerivation deriv = infer_partial(p);
  if (deriv.well_typed) throw NotIllTypedError();
  BlameReport r;
  r.k = 1;
  int origin = deriv.errors.front().origin;
  r.entries.push_back({origin, p.at(origin).span, 1.0});
  return r;
}

}  // namespace nate
