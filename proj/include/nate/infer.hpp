#pragma once

// Constraint-based type inference that keeps going after failures.
//
// Every node id owns the type variable with the same index.  The walker
// emits equations in a fixed order chosen to mirror how an eager
// unification-as-you-go checker behaves: a function's arrow shape is
// established before its body is visited, and each match arm is reconciled
// with the match type as soon as the arm is done.  A failing equation is
// recorded as a TypeError, rolled back, and skipped.
//
// Per-node types are traversal-order snapshots: after each equation, the
// nodes whose subtree the equation originated in get their current type
// recorded.  A node is therefore frozen at the moment its own region of the
// program was last constrained, which is also what makes the recorded types
// order-biased for ill-typed programs (an error's origin keeps its
// pre-conflict type).  For a well-typed program the root's entry equals the
// fully substituted type.

#include <map>
#include <string>
#include <vector>

#include "nate/lang.hpp"
#include "nate/types.hpp"

namespace nate {

struct Constraint {
  TypePtr lhs, rhs;          // substituted at emission time
  TypePtr raw_lhs, raw_rhs;  // as constructed, for variable reachability
  int origin = -1;           // node that induced the equation
};

struct TypeError {
  enum class Kind { Clash, Occurs, Unbound };
  Kind kind;
  int constraint_index = -1;  // into PartialDerivation::constraints; -1 = Unbound
  int origin = -1;
  TypePtr expected, actual;

  // Identity of the error when tracking "the same error" across hole
  // substitutions: failure kind plus the head constructors of the two sides.
  // Inner components are deliberately not compared; holing an expression
  // elsewhere in the program may refine or unrefine them without changing
  // which conflict this is.
  std::string shape() const {
    auto head = [](const TypePtr& t) -> std::string {
      switch (t->tag) {
        case TyTag::Var: return "var";
        case TyTag::Int: return "int";
        case TyTag::Bool: return "bool";
        case TyTag::Fun: return "fun";
        case TyTag::Prod: return "pair";
        case TyTag::List: return "list";
      }
      return "?";
    };
    std::string k = kind == Kind::Clash ? "clash"
                    : kind == Kind::Occurs ? "occurs"
                                           : "unbound";
    return k + ":" + head(expected) + "|" + head(actual);
  }
};

struct Scheme {
  std::vector<int> vars;
  TypePtr body;
  // Type variable of the expression the scheme was generalized from, when
  // any; ties every use site back to its binding even where generalization
  // produced a ground type and severed the variable sharing.
  int source_var = -1;
};

struct PartialDerivation {
  std::vector<TypePtr> node_types;
  std::vector<Constraint> constraints;
  std::vector<TypeError> errors;
  // (fresh copy, quantified source) pairs from scheme instantiation; needed
  // by consumers that trace variable sharing across let-polymorphism.
  std::vector<std::pair<int, int>> instantiation_links;
  bool well_typed = false;

  const TypePtr& root_type() const { return node_types[0]; }
};

namespace detail {

class Inferencer {
 public:
  explicit Inferencer(const Program& p) : p_(p) {
    for (int i = 0; i < p.size(); ++i) subst_.fresh();
    out_.node_types.resize(p.size());
    snapshotted_.assign(p.size(), false);
  }

  PartialDerivation run() {
    std::map<std::string, Scheme> env;
    walk(0, env);
    for (int i = 0; i < p_.size(); ++i)
      if (!snapshotted_[i]) out_.node_types[i] = subst_.apply(tv(i));
    out_.well_typed = out_.errors.empty();
    return std::move(out_);
  }

 private:
  const Program& p_;
  Subst subst_;
  PartialDerivation out_;
  std::vector<bool> snapshotted_;

  static TypePtr tv(int id) { return Type::mk_var(id); }

  void snapshot_from(int origin) {
    for (int n = origin; n >= 0; n = p_.nodes[n].parent) {
      out_.node_types[n] = subst_.apply(tv(n));
      snapshotted_[n] = true;
    }
  }

  void constrain(const TypePtr& lhs, const TypePtr& rhs, int origin) {
    Constraint c;
    c.raw_lhs = lhs;
    c.raw_rhs = rhs;
    c.lhs = subst_.apply(lhs);
    c.rhs = subst_.apply(rhs);
    c.origin = origin;
    out_.constraints.push_back(c);
    auto r = subst_.unify(lhs, rhs);
    if (r != Subst::UnifyResult::Ok) {
      TypeError e;
      e.kind = r == Subst::UnifyResult::Occurs ? TypeError::Kind::Occurs
                                               : TypeError::Kind::Clash;
      e.constraint_index = static_cast<int>(out_.constraints.size()) - 1;
      e.origin = origin;
      e.expected = c.lhs;
      e.actual = c.rhs;
      out_.errors.push_back(e);
    }
    snapshot_from(origin);
  }

  TypePtr instantiate(const Scheme& s) {
    if (s.vars.empty()) return s.body;
    std::map<int, TypePtr> fresh;
    for (int v : s.vars) {
      fresh[v] = subst_.fresh_var();
      out_.instantiation_links.emplace_back(fresh[v]->var, v);
    }
    return subst_copy(s.body, fresh);
  }

  TypePtr subst_copy(const TypePtr& t, const std::map<int, TypePtr>& m) {
    TypePtr r = subst_.resolve(t);
    switch (r->tag) {
      case TyTag::Var: {
        auto it = m.find(r->var);
        return it == m.end() ? r : it->second;
      }
      case TyTag::Fun:
        return Type::fun(subst_copy(r->a, m), subst_copy(r->b, m));
      case TyTag::Prod:
        return Type::prod(subst_copy(r->a, m), subst_copy(r->b, m));
      case TyTag::List:
        return Type::list(subst_copy(r->a, m));
      default:
        return r;
    }
  }

  Scheme generalize(const std::map<std::string, Scheme>& env,
                    const TypePtr& t) {
    std::set<int> env_free;
    for (const auto& [_, s] : env) {
      std::set<int> f;
      subst_.free_vars(s.body, f);
      for (int v : s.vars) f.erase(v);
      env_free.insert(f.begin(), f.end());
    }
    std::set<int> fv;
    subst_.free_vars(t, fv);
    Scheme s;
    s.body = subst_.apply(t);
    for (int v : fv)
      if (!env_free.count(v)) s.vars.push_back(v);
    return s;
  }

  void walk(int id, const std::map<std::string, Scheme>& env) {
    const Node& n = p_.nodes[id];
    switch (n.kind) {
      case ExprKind::Var: {
        auto it = env.find(n.name);
        if (it == env.end()) {
          TypeError e;
          e.kind = TypeError::Kind::Unbound;
          e.origin = id;
          e.expected = subst_.apply(tv(id));
          e.actual = e.expected;
          out_.errors.push_back(e);
          snapshot_from(id);
        } else {
          if (it->second.source_var >= 0)
            out_.instantiation_links.emplace_back(id, it->second.source_var);
          constrain(tv(id), instantiate(it->second), id);
        }
        break;
      }
      case ExprKind::IntLit:
        constrain(tv(id), Type::ints(), id);
        break;
      case ExprKind::BoolLit:
        constrain(tv(id), Type::bools(), id);
        break;
      case ExprKind::Nil:
        constrain(tv(id), Type::list(subst_.fresh_var()), id);
        break;
      case ExprKind::Hole:
        break;  // fresh, unconstrained
      case ExprKind::Fun: {
        TypePtr param = subst_.fresh_var();
        constrain(tv(id), Type::fun(param, tv(n.children[0])), id);
        auto env2 = env;
        env2[n.name] = Scheme{{}, param};
        walk(n.children[0], env2);
        break;
      }
      case ExprKind::App:
        walk(n.children[0], env);
        walk(n.children[1], env);
        constrain(tv(n.children[0]), Type::fun(tv(n.children[1]), tv(id)), id);
        break;
      case ExprKind::Plus:
        walk(n.children[0], env);
        walk(n.children[1], env);
        constrain(Type::ints(), tv(n.children[0]), n.children[0]);
        constrain(Type::ints(), tv(n.children[1]), n.children[1]);
        constrain(tv(id), Type::ints(), id);
        break;
      case ExprKind::If:
        walk(n.children[0], env);
        constrain(Type::bools(), tv(n.children[0]), n.children[0]);
        walk(n.children[1], env);
        constrain(tv(id), tv(n.children[1]), n.children[1]);
        walk(n.children[2], env);
        constrain(tv(id), tv(n.children[2]), n.children[2]);
        break;
      case ExprKind::Pair:
        walk(n.children[0], env);
        walk(n.children[1], env);
        constrain(tv(id), Type::prod(tv(n.children[0]), tv(n.children[1])),
                  id);
        break;
      case ExprKind::Cons:
        walk(n.children[0], env);
        walk(n.children[1], env);
        constrain(Type::list(tv(n.children[0])), tv(n.children[1]),
                  n.children[1]);
        constrain(tv(id), Type::list(tv(n.children[0])), id);
        break;
      case ExprKind::Let: {
        if (n.flag) {
          auto env1 = env;
          env1[n.name] = Scheme{{}, tv(n.children[0])};  // monomorphic to itself
          walk(n.children[0], env1);
        } else {
          walk(n.children[0], env);
        }
        auto env2 = env;
        Scheme s = generalize(env, tv(n.children[0]));
        s.source_var = n.children[0];  // node vars share the node's index
        env2[n.name] = s;
        walk(n.children[1], env2);
        constrain(tv(id), tv(n.children[1]), id);
        break;
      }
      case ExprKind::PairCase: {
        walk(n.children[0], env);
        TypePtr a = subst_.fresh_var();
        TypePtr b = subst_.fresh_var();
        constrain(Type::prod(a, b), tv(n.children[0]), n.children[0]);
        auto env2 = env;
        env2[n.binders[0]] = Scheme{{}, a};
        env2[n.binders[1]] = Scheme{{}, b};
        walk(n.children[1], env2);
        constrain(tv(id), tv(n.children[1]), n.children[1]);
        break;
      }
      case ExprKind::ListCase: {
        walk(n.children[0], env);
        TypePtr elem = subst_.fresh_var();
        constrain(Type::list(elem), tv(n.children[0]), n.children[0]);
        walk(n.children[1], env);
        constrain(tv(id), tv(n.children[1]), n.children[1]);
        auto env2 = env;
        env2[n.binders[0]] = Scheme{{}, elem};
        env2[n.binders[1]] = Scheme{{}, Type::list(elem)};
        walk(n.children[2], env2);
        constrain(tv(id), tv(n.children[2]), n.children[2]);
        break;
      }
    }
  }
};

}  // namespace detail

inline PartialDerivation infer_partial(const Program& p) {
  return detail::Inferencer(p).run();
}

inline std::vector<Constraint> generate_constraints(const Program& p) {
  return infer_partial(p).constraints;
}

}  // namespace nate
