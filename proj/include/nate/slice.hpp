#pragma once

// Minimal type-error slices.  For each recorded error, the slice is the set
// of nodes whose individual replacement by a hole makes that error (by
// expected/actual shape at its origin, after id remapping) disappear.
//
// Construction: candidate nodes are narrowed first by following shared type
// variables through the raw constraint list from the failing equation (an
// equation in a disconnected variable component cannot influence the
// conflict; sharing introduced by scheme instantiation is tracked via
// explicit links), then each candidate is decided by actually holing it and
// re-running inference.  Minimality holds by construction; sufficiency —
// holing anything outside the slices keeps the program ill-typed — is an
// independent recheck.  Both are exposed for the CLI and the test suites.
//
// A per-program time budget keeps corpus runs bounded: when it is exhausted,
// remaining errors fall back to the over-approximate reachable node set and
// are flagged non-minimal.

#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "nate/infer.hpp"
#include "nate/lang.hpp"

namespace nate {

struct ErrorSlice {
  int error_index = 0;
  std::set<int> nodes;
  bool minimal = true;  // false when the time budget forced the fallback
};

struct SliceConfig {
  long long budget_ms = 1000;
};

inline bool in_any_slice(const std::vector<ErrorSlice>& slices, int id) {
  for (const auto& s : slices)
    if (s.nodes.count(id)) return true;
  return false;
}

namespace detail {

// Remaps a node id across the holing of the subtree rooted at `holed`;
// -1 if the node vanished inside it.
inline int remap_across_hole(const Program& p, int holed, int id) {
  int sz = static_cast<int>(p.nodes[holed].subtree_size);
  if (id < holed) return id;
  if (id < holed + sz) return -1;
  return id - (sz - 1);
}

// Does `err` (an error of `p`) survive in the program obtained by holing
// `holed`?  Identity is the error shape at the remapped origin.
inline bool error_survives(const Program& p, const TypeError& err, int holed,
                           const Program& holed_program) {
  int origin = remap_across_hole(p, holed, err.origin);
  if (origin < 0) return false;
  std::string shape = err.shape();
  for (const auto& e : infer_partial(holed_program).errors)
    if (e.origin == origin && e.shape() == shape) return true;
  return false;
}

// Over-approximation of the nodes that can influence the error: origins of
// all constraints connected to the failing one through shared variables
// (including sharing through scheme instantiation), closed under ancestors
// since holing an ancestor removes the origin's constraints too.
inline std::set<int> reachable_nodes(const Program& p,
                                     const PartialDerivation& d,
                                     const TypeError& err) {
  auto vars_of = [](const TypePtr& t, std::vector<int>& out) {
    std::vector<const Type*> stack{t.get()};
    while (!stack.empty()) {
      const Type* x = stack.back();
      stack.pop_back();
      if (x->tag == TyTag::Var) out.push_back(x->var);
      if (x->a) stack.push_back(x->a.get());
      if (x->b) stack.push_back(x->b.get());
    }
  };
  size_t n = d.constraints.size();
  std::vector<std::vector<int>> cvars(n);
  int max_var = p.size();
  for (size_t i = 0; i < n; ++i) {
    vars_of(d.constraints[i].raw_lhs, cvars[i]);
    vars_of(d.constraints[i].raw_rhs, cvars[i]);
    for (int v : cvars[i]) max_var = std::max(max_var, v + 1);
  }
  for (const auto& [a, b] : d.instantiation_links)
    max_var = std::max({max_var, a + 1, b + 1});

  std::vector<int> uf(max_var);
  for (int i = 0; i < max_var; ++i) uf[i] = i;
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  auto join = [&](int a, int b) { uf[find(a)] = find(b); };
  for (const auto& vs : cvars)
    for (size_t i = 1; i < vs.size(); ++i) join(vs[0], vs[i]);
  for (const auto& [a, b] : d.instantiation_links) join(a, b);

  int seed;
  if (err.constraint_index >= 0 && !cvars[err.constraint_index].empty()) {
    seed = find(cvars[err.constraint_index][0]);
  } else {
    seed = find(err.origin);  // unbound variable: its own node var
  }

  std::set<int> nodes;
  for (size_t i = 0; i < n; ++i) {
    bool touches = false;
    for (int v : cvars[i])
      if (find(v) == seed) {
        touches = true;
        break;
      }
    if (touches)
      for (int a = d.constraints[i].origin; a >= 0; a = p.nodes[a].parent)
        nodes.insert(a);
  }
  for (int a = err.origin; a >= 0; a = p.nodes[a].parent) nodes.insert(a);
  return nodes;
}

}  // namespace detail

inline Program hole_node(const Program& p, int id) {
  return replace_subtree(p, id, Expr::hole());
}

inline std::vector<ErrorSlice> minimal_slices(
    const Program& p, const SliceConfig& cfg = SliceConfig{}) {
  PartialDerivation d = infer_partial(p);
  if (d.well_typed) throw NotIllTypedError();

  auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    return ms > cfg.budget_ms;
  };

  std::vector<ErrorSlice> slices;
  for (size_t k = 0; k < d.errors.size(); ++k) {
    const TypeError& err = d.errors[k];
    std::set<int> candidates = detail::reachable_nodes(p, d, err);
    ErrorSlice slice;
    slice.error_index = static_cast<int>(k);
    if (out_of_time()) {
      slice.nodes = std::move(candidates);
      slice.minimal = false;
      slices.push_back(std::move(slice));
      continue;
    }
    for (int id : candidates) {
      if (out_of_time()) {
        // Keep what has been proven plus everything not yet examined.
        for (int rest : candidates)
          if (rest >= id) slice.nodes.insert(rest);
        slice.minimal = false;
        break;
      }
      if (!detail::error_survives(p, err, id, hole_node(p, id)))
        slice.nodes.insert(id);
    }
    slices.push_back(std::move(slice));
  }
  return slices;
}

// The maximal subtrees containing no slice node; holing exactly these is the
// sufficiency experiment.
inline std::vector<int> complement_subtrees(
    const Program& p, const std::vector<ErrorSlice>& slices) {
  std::vector<bool> in_slice(p.size(), false);
  for (const auto& s : slices)
    for (int id : s.nodes) in_slice[id] = true;
  // subtree_hits[i] = does the subtree rooted at i contain a slice node?
  std::vector<bool> hit(p.size(), false);
  for (int i = p.size() - 1; i >= 0; --i) {
    hit[i] = in_slice[i];
    for (int c : p.nodes[i].children) hit[i] = hit[i] || hit[c];
  }
  std::vector<int> roots;
  for (int i = 0; i < p.size(); ++i) {
    if (hit[i]) continue;
    int parent = p.nodes[i].parent;
    if (parent < 0 || hit[parent]) roots.push_back(i);
  }
  return roots;
}

// Sufficiency: replacing any subtree outside all slices with a hole leaves
// the program ill-typed — every tracked error must survive each such
// replacement.  (Checked one subtree at a time: with per-node slices, a
// program whose error evidence flows redundantly through both branches of a
// conditional has no slice at all under the all-at-once reading, since
// neither branch alone is load-bearing.)
inline bool verify_sufficiency(const Program& p,
                               const std::vector<ErrorSlice>& slices) {
  PartialDerivation d = infer_partial(p);
  for (int r : complement_subtrees(p, slices)) {
    Program holed = hole_node(p, r);
    for (const auto& err : d.errors)
      if (!detail::error_survives(p, err, r, holed)) return false;
  }
  return true;
}

// Minimality: holing any single slice member removes that slice's error.
inline bool verify_minimality(const Program& p,
                              const std::vector<ErrorSlice>& slices) {
  PartialDerivation d = infer_partial(p);
  for (const auto& s : slices) {
    const TypeError& err = d.errors[s.error_index];
    for (int id : s.nodes)
      if (detail::error_survives(p, err, id, hole_node(p, id))) return false;
  }
  return true;
}

}  // namespace nate
