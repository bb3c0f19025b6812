#pragma once

// Independent oracles used only by tests:
//   * ref_w      -- a textbook algorithm-W implementation returning fully
//                   substituted per-node types for well-typed programs.
//   * eval_fuel  -- a substitution-based small-step interpreter; reports
//                   whether a closed term got stuck within the fuel budget.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nate/infer.hpp"
#include "nate/lang.hpp"
#include "nate/types.hpp"

namespace testsupport {

using namespace nate;

// --------------------------------------------------------------------------
// Reference algorithm W.

struct WFailure : std::runtime_error {
  WFailure() : std::runtime_error("ill-typed under reference W") {}
};

class RefW {
 public:
  explicit RefW(const Program& p) : p_(p) { node_ty_.resize(p.size()); }

  std::vector<TypePtr> run() {
    std::map<std::string, Scheme> env;
    infer(0, env);
    std::vector<TypePtr> out(p_.size());
    for (int i = 0; i < p_.size(); ++i) out[i] = s_.apply(node_ty_[i]);
    return out;
  }

 private:
  const Program& p_;
  Subst s_;
  std::vector<TypePtr> node_ty_;

  void unify(const TypePtr& a, const TypePtr& b) {
    if (s_.unify(a, b) != Subst::UnifyResult::Ok) throw WFailure();
  }

  TypePtr inst(const Scheme& sc) {
    std::map<int, TypePtr> m;
    for (int v : sc.vars) m[v] = s_.fresh_var();
    return copy(sc.body, m);
  }

  TypePtr copy(const TypePtr& t, const std::map<int, TypePtr>& m) {
    TypePtr r = s_.resolve(t);
    switch (r->tag) {
      case TyTag::Var: {
        auto it = m.find(r->var);
        return it == m.end() ? r : it->second;
      }
      case TyTag::Fun: return Type::fun(copy(r->a, m), copy(r->b, m));
      case TyTag::Prod: return Type::prod(copy(r->a, m), copy(r->b, m));
      case TyTag::List: return Type::list(copy(r->a, m));
      default: return r;
    }
  }

  Scheme gen(const std::map<std::string, Scheme>& env, const TypePtr& t) {
    std::set<int> env_free;
    for (const auto& [_, sc] : env) {
      std::set<int> f;
      s_.free_vars(sc.body, f);
      for (int v : sc.vars) f.erase(v);
      env_free.insert(f.begin(), f.end());
    }
    std::set<int> fv;
    s_.free_vars(t, fv);
    Scheme sc;
    sc.body = s_.apply(t);
    for (int v : fv)
      if (!env_free.count(v)) sc.vars.push_back(v);
    return sc;
  }

  TypePtr infer(int id, const std::map<std::string, Scheme>& env) {
    const Node& n = p_.nodes[id];
    TypePtr ty;
    switch (n.kind) {
      case ExprKind::Var: {
        auto it = env.find(n.name);
        if (it == env.end()) throw WFailure();
        ty = inst(it->second);
        break;
      }
      case ExprKind::IntLit: ty = Type::ints(); break;
      case ExprKind::BoolLit: ty = Type::bools(); break;
      case ExprKind::Nil: ty = Type::list(s_.fresh_var()); break;
      case ExprKind::Hole: ty = s_.fresh_var(); break;
      case ExprKind::Fun: {
        TypePtr param = s_.fresh_var();
        auto env2 = env;
        env2[n.name] = Scheme{{}, param};
        TypePtr body = infer(n.children[0], env2);
        ty = Type::fun(param, body);
        break;
      }
      case ExprKind::App: {
        TypePtr f = infer(n.children[0], env);
        TypePtr a = infer(n.children[1], env);
        TypePtr res = s_.fresh_var();
        unify(f, Type::fun(a, res));
        ty = res;
        break;
      }
      case ExprKind::Plus: {
        unify(infer(n.children[0], env), Type::ints());
        unify(infer(n.children[1], env), Type::ints());
        ty = Type::ints();
        break;
      }
      case ExprKind::If: {
        unify(infer(n.children[0], env), Type::bools());
        TypePtr t = infer(n.children[1], env);
        TypePtr f = infer(n.children[2], env);
        unify(t, f);
        ty = t;
        break;
      }
      case ExprKind::Pair:
        ty = Type::prod(infer(n.children[0], env), infer(n.children[1], env));
        break;
      case ExprKind::Cons: {
        TypePtr h = infer(n.children[0], env);
        TypePtr t = infer(n.children[1], env);
        unify(t, Type::list(h));
        ty = Type::list(h);
        break;
      }
      case ExprKind::Let: {
        TypePtr bound;
        if (n.flag) {
          TypePtr self = s_.fresh_var();
          auto env1 = env;
          env1[n.name] = Scheme{{}, self};
          bound = infer(n.children[0], env1);
          unify(self, bound);
        } else {
          bound = infer(n.children[0], env);
        }
        auto env2 = env;
        env2[n.name] = gen(env, bound);
        ty = infer(n.children[1], env2);
        break;
      }
      case ExprKind::PairCase: {
        TypePtr scrut = infer(n.children[0], env);
        TypePtr a = s_.fresh_var(), b = s_.fresh_var();
        unify(scrut, Type::prod(a, b));
        auto env2 = env;
        env2[n.binders[0]] = Scheme{{}, a};
        env2[n.binders[1]] = Scheme{{}, b};
        ty = infer(n.children[1], env2);
        break;
      }
      case ExprKind::ListCase: {
        TypePtr scrut = infer(n.children[0], env);
        TypePtr elem = s_.fresh_var();
        unify(scrut, Type::list(elem));
        TypePtr nil_ty = infer(n.children[1], env);
        auto env2 = env;
        env2[n.binders[0]] = Scheme{{}, elem};
        env2[n.binders[1]] = Scheme{{}, Type::list(elem)};
        TypePtr cons_ty = infer(n.children[2], env2);
        unify(nil_ty, cons_ty);
        ty = nil_ty;
        break;
      }
    }
    node_ty_[id] = ty;
    return ty;
  }
};

// True when `specific` can be obtained from `general` by substituting
// general's variables (consistently).
inline bool instance_of(const TypePtr& general, const TypePtr& specific,
                        std::map<int, std::string>& binding) {
  if (general->tag == TyTag::Var) {
    std::string key = show_type(specific);
    auto [it, inserted] = binding.emplace(general->var, key);
    return it->second == key;
  }
  if (general->tag != specific->tag) return false;
  switch (general->tag) {
    case TyTag::Int:
    case TyTag::Bool:
      return true;
    case TyTag::Fun:
    case TyTag::Prod:
      return instance_of(general->a, specific->a, binding) &&
             instance_of(general->b, specific->b, binding);
    case TyTag::List:
      return instance_of(general->a, specific->a, binding);
    default:
      return false;
  }
}

inline bool instance_of(const TypePtr& general, const TypePtr& specific) {
  std::map<int, std::string> binding;
  return instance_of(general, specific, binding);
}

// --------------------------------------------------------------------------
// Small-step interpreter.

enum class EvalOutcome { Value, Stuck, FuelOut };

inline bool is_value(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::Nil:
    case ExprKind::Fun:
      return true;
    case ExprKind::Pair:
    case ExprKind::Cons:
      return is_value(*e.children[0]) && is_value(*e.children[1]);
    default:
      return false;
  }
}

inline ExprPtr subst_many(const ExprPtr& e,
                          const std::map<std::string, ExprPtr>& m) {
  if (m.empty()) return e;
  auto without = [&](std::initializer_list<std::string> names) {
    auto m2 = m;
    for (const auto& n : names) m2.erase(n);
    return m2;
  };
  switch (e->kind) {
    case ExprKind::Var: {
      auto it = m.find(e->name);
      return it == m.end() ? e : it->second;
    }
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::Nil:
    case ExprKind::Hole:
      return e;
    case ExprKind::Fun:
      return Expr::fun(e->name, subst_many(e->children[0], without({e->name})));
    case ExprKind::Let: {
      auto inner = without({e->name});
      return Expr::let(e->name, e->flag,
                       subst_many(e->children[0], e->flag ? inner : m),
                       subst_many(e->children[1], inner));
    }
    case ExprKind::App:
      return Expr::app(subst_many(e->children[0], m),
                       subst_many(e->children[1], m));
    case ExprKind::Plus:
      return Expr::plus(subst_many(e->children[0], m),
                        subst_many(e->children[1], m));
    case ExprKind::If:
      return Expr::if_(subst_many(e->children[0], m),
                       subst_many(e->children[1], m),
                       subst_many(e->children[2], m));
    case ExprKind::Pair:
      return Expr::pair(subst_many(e->children[0], m),
                        subst_many(e->children[1], m));
    case ExprKind::Cons:
      return Expr::cons(subst_many(e->children[0], m),
                        subst_many(e->children[1], m));
    case ExprKind::PairCase:
      return Expr::pair_case(
          subst_many(e->children[0], m), e->binders[0], e->binders[1],
          subst_many(e->children[1], without({e->binders[0], e->binders[1]})));
    case ExprKind::ListCase:
      return Expr::list_case(
          subst_many(e->children[0], m), subst_many(e->children[1], m),
          e->binders[0], e->binders[1],
          subst_many(e->children[2], without({e->binders[0], e->binders[1]})));
  }
  return e;
}

// One reduction step; nullopt means stuck.
inline std::optional<ExprPtr> step(const ExprPtr& e) {
  auto step_child = [&](size_t i) -> std::optional<ExprPtr> {
    auto stepped = step(e->children[i]);
    if (!stepped) return std::nullopt;
    auto copy = std::make_shared<Expr>(*e);
    copy->children[i] = *stepped;
    return ExprPtr(copy);
  };
  switch (e->kind) {
    case ExprKind::Var:
    case ExprKind::Hole:
      return std::nullopt;
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::Nil:
    case ExprKind::Fun:
      return std::nullopt;  // values don't step; callers check is_value
    case ExprKind::App: {
      if (!is_value(*e->children[0])) return step_child(0);
      if (!is_value(*e->children[1])) return step_child(1);
      if (e->children[0]->kind != ExprKind::Fun) return std::nullopt;
      return subst_many(e->children[0]->children[0],
                        {{e->children[0]->name, e->children[1]}});
    }
    case ExprKind::Plus: {
      if (!is_value(*e->children[0])) return step_child(0);
      if (!is_value(*e->children[1])) return step_child(1);
      if (e->children[0]->kind != ExprKind::IntLit ||
          e->children[1]->kind != ExprKind::IntLit)
        return std::nullopt;
      return Expr::int_lit(e->children[0]->value + e->children[1]->value);
    }
    case ExprKind::If: {
      if (!is_value(*e->children[0])) return step_child(0);
      if (e->children[0]->kind != ExprKind::BoolLit) return std::nullopt;
      return e->children[0]->flag ? e->children[1] : e->children[2];
    }
    case ExprKind::Pair:
    case ExprKind::Cons: {
      if (!is_value(*e->children[0])) return step_child(0);
      if (!is_value(*e->children[1])) return step_child(1);
      return std::nullopt;  // whole thing is a value
    }
    case ExprKind::Let: {
      if (!is_value(*e->children[0])) return step_child(0);
      ExprPtr bound = e->children[0];
      if (e->flag) {
        ExprPtr wrapper =
            Expr::let(e->name, true, e->children[0], Expr::var(e->name));
        bound = subst_many(e->children[0], {{e->name, wrapper}});
      }
      return subst_many(e->children[1], {{e->name, bound}});
    }
    case ExprKind::PairCase: {
      if (!is_value(*e->children[0])) return step_child(0);
      const Expr& s = *e->children[0];
      if (s.kind != ExprKind::Pair) return std::nullopt;
      return subst_many(e->children[1], {{e->binders[0], s.children[0]},
                                         {e->binders[1], s.children[1]}});
    }
    case ExprKind::ListCase: {
      if (!is_value(*e->children[0])) return step_child(0);
      const Expr& s = *e->children[0];
      if (s.kind == ExprKind::Nil) return e->children[1];
      if (s.kind != ExprKind::Cons) return std::nullopt;
      return subst_many(e->children[2], {{e->binders[0], s.children[0]},
                                         {e->binders[1], s.children[1]}});
    }
  }
  return std::nullopt;
}

inline EvalOutcome eval_fuel(ExprPtr e, int fuel = 20000) {
  while (fuel-- > 0) {
    if (is_value(*e)) return EvalOutcome::Value;
    auto next = step(e);
    if (!next) return EvalOutcome::Stuck;
    e = *next;
  }
  return EvalOutcome::FuelOut;
}

}  // namespace testsupport
