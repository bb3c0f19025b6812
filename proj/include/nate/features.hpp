#pragma once

// Turns each subexpression of an ill-typed program into a named, fixed-width
// real vector: one-hot syntactic class, syntactic classes of the parent and
// first three children, type-constructor mentions for the same five slots,
// subtree size, and slice membership.  With slice filtering on (the
// default), nodes outside every error slice are not emitted at all.

#include <set>
#include <string>
#include <vector>

#include "nate/diff.hpp"
#include "nate/infer.hpp"
#include "nate/lang.hpp"
#include "nate/slice.hpp"

namespace nate {

enum class FeatureGroup : uint8_t { LocalSyn, CtxSyn, Size, Type, Slice };

struct FeatureDef {
  std::string name;
  FeatureGroup group;
};

struct FeatureSchema {
  std::string version;
  std::vector<FeatureDef> features;

  int width() const { return static_cast<int>(features.size()); }

  int index_of(const std::string& name) const {
    for (size_t i = 0; i < features.size(); ++i)
      if (features[i].name == name) return static_cast<int>(i);
    return -1;
  }

  int count(FeatureGroup g) const {
    int n = 0;
    for (const auto& f : features) n += f.group == g;
    return n;
  }
};

inline const char* feature_kind_name(ExprKind k) { return kind_name(k); }

// The fixed, versioned schema for this language:
//   14 syntactic classes, contexts = parent + first three children,
//   5 type constructors over the same five slots, size, in-slice.
//   Width 14 + 4*14 + (1+4)*5 + 1 + 1 = 97.
inline const FeatureSchema& schema() {
  static const FeatureSchema s = [] {
    FeatureSchema sc;
    sc.version = "lml97-v1";
    auto add = [&](std::string name, FeatureGroup g) {
      sc.features.push_back({std::move(name), g});
    };
    const char* slots[4] = {"-p", "-c1", "-c2", "-c3"};
    for (int k = 0; k < kExprKindCount; ++k)
      add(std::string("is-") + kind_name(static_cast<ExprKind>(k)),
          FeatureGroup::LocalSyn);
    for (const char* slot : slots)
      for (int k = 0; k < kExprKindCount; ++k)
        add(std::string("is-") + kind_name(static_cast<ExprKind>(k)) + slot,
            FeatureGroup::CtxSyn);
    for (int c = 0; c < kTyConCount; ++c)
      add(std::string("has-type-") + tycon_name(static_cast<TyCon>(c)),
          FeatureGroup::Type);
    for (const char* slot : slots)
      for (int c = 0; c < kTyConCount; ++c)
        add(std::string("has-type-") + tycon_name(static_cast<TyCon>(c)) +
                slot,
            FeatureGroup::Type);
    add("size", FeatureGroup::Size);
    add("in-slice", FeatureGroup::Slice);
    return sc;
  }();
  return s;
}

struct Sample {
  int program = 0;  // corpus index of the originating pair
  int node = 0;     // node id within the bad program
  std::vector<double> values;
  bool label = false;
};

namespace detail {

// Layout of the 97-wide vector; keep in sync with schema().
constexpr int kWidth =
    kExprKindCount + 4 * kExprKindCount + 5 * kTyConCount + 1 + 1;

}  // namespace detail

inline std::vector<double> local_syntactic(const Program& p, int id) {
  std::vector<double> v(kExprKindCount, 0.0);
  v[static_cast<int>(p.at(id).kind)] = 1.0;
  return v;
}

inline std::vector<double> contextual_syntactic(const Program& p, int id) {
  std::vector<double> v(4 * kExprKindCount, 0.0);
  const Node& n = p.at(id);
  if (n.parent >= 0)
    v[static_cast<int>(p.nodes[n.parent].kind)] = 1.0;
  for (size_t c = 0; c < n.children.size() && c < 3; ++c)
    v[(c + 1) * kExprKindCount +
      static_cast<int>(p.nodes[n.children[c]].kind)] = 1.0;
  return v;
}

inline double size_feature(const Program& p, int id) {
  return static_cast<double>(p.at(id).subtree_size);
}

inline std::vector<double> typing_features(const Program& p, int id,
                                           const PartialDerivation& deriv) {
  std::vector<double> v(5 * kTyConCount, 0.0);
  auto set = [&](int slot, int node) {
    for (TyCon c : type_mentions(deriv.node_types[node]))
      v[slot * kTyConCount + static_cast<int>(c)] = 1.0;
  };
  set(0, id);
  const Node& n = p.at(id);
  if (n.parent >= 0) set(1, n.parent);
  for (size_t c = 0; c < n.children.size() && c < 3; ++c)
    set(static_cast<int>(c) + 2, n.children[c]);
  return v;
}

// One sample per node of `p` in pre-order; with `filter_slice`, nodes
// outside every slice are preemptively discarded.
inline std::vector<Sample> extract_program(
    const Program& p, const PartialDerivation& deriv,
    const std::vector<ErrorSlice>& slices, const std::set<int>& changed,
    bool filter_slice, int program_index = 0) {
  std::vector<Sample> out;
  for (int id = 0; id < p.size(); ++id) {
    bool sliced = in_any_slice(slices, id);
    if (filter_slice && !sliced) continue;
    Sample s;
    s.program = program_index;
    s.node = id;
    s.label = changed.count(id) > 0;
    std::vector<double>& v = s.values;
    v.reserve(detail::kWidth);
    std::vector<double> local = local_syntactic(p, id);
    std::vector<double> ctx = contextual_syntactic(p, id);
    std::vector<double> typing = typing_features(p, id, deriv);
    v.insert(v.end(), local.begin(), local.end());
    v.insert(v.end(), ctx.begin(), ctx.end());
    v.insert(v.end(), typing.begin(), typing.end());
    v.push_back(size_feature(p, id));
    v.push_back(sliced ? 1.0 : 0.0);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Sample> extract(const ProgramPair& pair,
                                   const std::vector<ErrorSlice>& slices,
                                   const BlameLabels& labels,
                                   bool filter_slice,
                                   int program_index = 0) {
  PartialDerivation deriv = infer_partial(pair.bad);
  return extract_program(pair.bad, deriv, slices, labels.changed,
                         filter_slice, program_index);
}

// ---------------------------------------------------------------------------
// Feature-group masks, for the ablation experiments.  LocalSyn is always
// present; the other groups are opt-in.

struct FeatureMask {
  std::vector<int> active;  // indices into the full schema, ascending

  int width() const { return static_cast<int>(active.size()); }

  std::vector<double> apply(const std::vector<double>& full) const {
    std::vector<double> out(active.size());
    for (size_t i = 0; i < active.size(); ++i) out[i] = full[active[i]];
    return out;
  }
};

inline FeatureMask mask_for_groups(const std::set<FeatureGroup>& groups) {
  FeatureMask m;
  const FeatureSchema& s = schema();
  for (int i = 0; i < s.width(); ++i) {
    FeatureGroup g = s.features[i].group;
    if (g == FeatureGroup::LocalSyn || groups.count(g))
      m.active.push_back(i);
  }
  return m;
}

inline FeatureMask full_mask() {
  return mask_for_groups({FeatureGroup::CtxSyn, FeatureGroup::Size,
                          FeatureGroup::Type, FeatureGroup::Slice});
}

}  // namespace nate
