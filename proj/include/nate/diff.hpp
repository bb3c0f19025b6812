#pragma once

// Expression-level diff between an ill-typed program and its fix, producing
// the blame-label set, plus the corpus-level outlier filter.
//
// The diff is a top-down simultaneous descent with subtree-hash pruning:
//   * equal subtrees contribute nothing;
//   * same-kind nodes recurse into their (fixed-arity) children, marking the
//     node itself first when its own payload (name, literal value, rec flag,
//     binders) changed;
//   * different-kind nodes mark the bad-side node and stop: either the fix
//     wrapped it (some child of the fix node equals it — the new operator
//     now occupies its position), the fix unwrapped it (some child of it
//     equals the fix node — the removed operator is blamed), or it was
//     replaced wholesale.  Ties among hash-equal children resolve leftmost.

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nate/errors.hpp"
#include "nate/lang.hpp"

namespace nate {

struct ProgramPair {
  Program bad;  // ill-typed
  Program fix;  // well-typed
  std::string meta;  // free-form provenance (JSON text in corpus files)
};

struct BlameLabels {
  std::set<int> changed;      // node ids in bad
  double diff_fraction = 0.0; // |changed| / |nodes of bad|
};

namespace detail {

inline uint64_t hash_mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

inline std::vector<uint64_t> subtree_hashes(const Program& p) {
  std::vector<uint64_t> h(p.size());
  for (int i = p.size() - 1; i >= 0; --i) {
    const Node& n = p.nodes[i];
    uint64_t x = static_cast<uint64_t>(n.kind) + 1;
    x = hash_mix(x, std::hash<std::string>{}(n.name));
    x = hash_mix(x, static_cast<uint64_t>(n.value));
    x = hash_mix(x, n.flag ? 2 : 1);
    for (const auto& b : n.binders)
      x = hash_mix(x, std::hash<std::string>{}(b));
    for (int c : n.children) x = hash_mix(x, h[c]);
    h[i] = x;
  }
  return h;
}

inline bool subtree_equal(const Program& a, int ai, const Program& b, int bi) {
  const Node& x = a.nodes[ai];
  const Node& y = b.nodes[bi];
  if (x.kind != y.kind || x.name != y.name || x.value != y.value ||
      x.flag != y.flag || x.binders != y.binders ||
      x.children.size() != y.children.size())
    return false;
  for (size_t i = 0; i < x.children.size(); ++i)
    if (!subtree_equal(a, x.children[i], b, y.children[i])) return false;
  return true;
}

inline bool payload_equal(const Node& x, const Node& y) {
  return x.name == y.name && x.value == y.value && x.flag == y.flag &&
         x.binders == y.binders;
}

struct Differ {
  const Program& bad;
  const Program& fix;
  std::vector<uint64_t> bh, fh;
  std::set<int>* out;

  bool eq(int bi, int fi) const {
    return bh[bi] == fh[fi] && subtree_equal(bad, bi, fix, fi);
  }

  void walk(int bi, int fi) {
    if (eq(bi, fi)) return;
    const Node& b = bad.nodes[bi];
    const Node& f = fix.nodes[fi];
    if (b.kind == f.kind) {
      if (!payload_equal(b, f)) out->insert(bi);
      for (size_t i = 0; i < b.children.size(); ++i)
        walk(b.children[i], f.children[i]);
      return;
    }
    // An insertion around this node (wrap), a deletion of an operator above
    // the fix-side node (unwrap), or a wholesale replacement: in each case
    // blame lands on the bad-side node occupying this position.
    for (int c : f.children)
      if (eq(bi, c)) {
        out->insert(bi);  // wrapped: leftmost matching child wins
        return;
      }
    for (int c : b.children)
      if (bh[c] == fh[fi] && subtree_equal(bad, c, fix, fi)) {
        out->insert(bi);  // unwrapped: blame the removed operator
        return;
      }
    out->insert(bi);  // replaced wholesale
  }
};

}  // namespace detail

inline BlameLabels tree_diff(const ProgramPair& pair) {
  BlameLabels labels;
  detail::Differ d{pair.bad, pair.fix, detail::subtree_hashes(pair.bad),
                   detail::subtree_hashes(pair.fix), &labels.changed};
  d.walk(0, 0);
  labels.diff_fraction =
      static_cast<double>(labels.changed.size()) / pair.bad.size();
  return labels;
}

struct OutlierPolicy {
  enum class Kind { Fixed, Sigma };
  Kind kind = Kind::Fixed;
  double theta = 0.40;

  static OutlierPolicy fixed(double theta) {
    return {Kind::Fixed, theta};
  }
  static OutlierPolicy sigma() { return {Kind::Sigma, 0.0}; }
};

// Splits the corpus into (kept, discarded) by diff fraction.  The sigma
// policy derives its threshold as mean + one standard deviation over the
// corpus; the fixed policy applies `theta` directly.
inline std::pair<std::vector<ProgramPair>, std::vector<ProgramPair>>
filter_outliers(const std::vector<ProgramPair>& corpus, OutlierPolicy policy) {
  std::vector<double> fractions;
  fractions.reserve(corpus.size());
  for (const auto& pair : corpus)
    fractions.push_back(tree_diff(pair).diff_fraction);

  double theta = policy.theta;
  if (policy.kind == OutlierPolicy::Kind::Sigma) {
    if (corpus.empty()) throw EmptyCorpusError();
    double mean = 0;
    for (double f : fractions) mean += f;
    mean /= fractions.size();
    double var = 0;
    for (double f : fractions) var += (f - mean) * (f - mean);
    var /= fractions.size();
    theta = mean + std::sqrt(var);
  }

  std::pair<std::vector<ProgramPair>, std::vector<ProgramPair>> out;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (fractions[i] <= theta)
      out.first.push_back(corpus[i]);
    else
      out.second.push_back(corpus[i]);
  }
  return out;
}

}  // namespace nate
