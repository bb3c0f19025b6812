#pragma once

// Seeded generation of well-typed programs and of single type-breaking
// mutations.  The corpus builder pairs a mutated program with its original,
// which stands in for an (ill-typed, fixed) pair; the mutation catalog
// covers the usual novice error shapes: a literal of the wrong type, + vs ::
// mixups, a dropped argument, and a spurious list literal around an
// expression.

#include <optional>
#include <string>
#include <vector>

#include "nate/infer.hpp"
#include "nate/lang.hpp"
#include "nate/rng.hpp"
#include "nate/types.hpp"

namespace nate {

namespace detail {

struct Binding {
  std::string name;
  TypePtr type;
};

class TermGen {
 public:
  explicit TermGen(RngEngine& rng) : rng_(rng) {}

  ExprPtr program() {
    fresh_ = 0;
    switch (rng_below(rng_, 10)) {
      case 0: case 1: case 2: case 3:
        return list_recursion();
      case 4: case 5:
        return let_chain();
      case 6: case 7:
        return pair_program();
      default:
        return expr({}, simple_type(2), 4);
    }
  }

  // let rec f xs = match xs with [] -> base | hd :: tl -> step in f arg
  ExprPtr list_recursion() {
    TypePtr elem = rng_below(rng_, 2) == 0 ? Type::ints() : Type::bools();
    TypePtr result =
        rng_below(rng_, 2) == 0 ? Type::ints() : Type::list(elem);
    std::string f = pick_name({"sum", "go", "walk", "count"});
    std::string xs = pick_name({"xs", "ys", "items"});
    std::string hd = pick_name({"hd", "h", "a"});
    std::string tl = pick_name({"tl", "t", "rest"});
    std::vector<Binding> env;
    ExprPtr base = expr(env, result, 2);
    std::vector<Binding> arm = env;
    arm.push_back({hd, elem});
    arm.push_back({tl, Type::list(elem)});
    arm.push_back({f, Type::fun(Type::list(elem), result)});
    ExprPtr rec_call = Expr::app(Expr::var(f), Expr::var(tl));
    ExprPtr step;
    if (rng_unit(rng_) < 0.85) {
      if (result->tag == TyTag::Int) {
        ExprPtr lhs = elem->tag == TyTag::Int && rng_below(rng_, 2) == 0
                          ? Expr::var(hd)
                          : expr(arm, Type::ints(), 1);
        step = Expr::plus(lhs, rec_call);
      } else {
        step = Expr::cons(Expr::var(hd), rec_call);
      }
    } else {
      step = expr(arm, result, 2);
    }
    ExprPtr body =
        Expr::list_case(Expr::var(xs), base, hd, tl, step);
    ExprPtr arg = expr(env, Type::list(elem), 2);
    return Expr::let(f, true, Expr::fun(xs, body),
                     Expr::app(Expr::var(f), arg));
  }

  ExprPtr let_chain() {
    std::vector<Binding> env;
    int n = 1 + static_cast<int>(rng_below(rng_, 3));
    std::vector<std::pair<std::string, ExprPtr>> lets;
    for (int i = 0; i < n; ++i) {
      TypePtr t = simple_type(1);
      std::string name = fresh_name();
      lets.emplace_back(name, expr(env, t, 2));
      env.push_back({name, t});
    }
    ExprPtr body = expr(env, simple_type(1), 3);
    for (size_t i = lets.size(); i-- > 0;)
      body = Expr::let(lets[i].first, false, lets[i].second, body);
    return body;
  }

  ExprPtr pair_program() {
    std::vector<Binding> env;
    TypePtr ta = simple_type(1), tb = simple_type(1);
    std::string p = pick_name({"p", "pr", "both"});
    std::string a = fresh_name(), b = fresh_name();
    ExprPtr built = Expr::pair(expr(env, ta, 2), expr(env, tb, 2));
    std::vector<Binding> inner = env;
    inner.push_back({a, ta});
    inner.push_back({b, tb});
    TypePtr goal = rng_below(rng_, 2) == 0 ? ta : Type::ints();
    ExprPtr body = expr(inner, goal, 2);
    return Expr::let(p, false, built,
                     Expr::pair_case(Expr::var(p), a, b, body));
  }

  TypePtr simple_type(int depth) {
    if (depth <= 0) return rng_below(rng_, 2) == 0 ? Type::ints() : Type::bools();
    switch (rng_below(rng_, 6)) {
      case 0: case 1: return Type::ints();
      case 2: return Type::bools();
      case 3: return Type::list(simple_type(depth - 1));
      case 4: return Type::prod(simple_type(depth - 1), simple_type(depth - 1));
      default: return Type::fun(simple_type(depth - 1), simple_type(depth - 1));
    }
  }

  ExprPtr expr(const std::vector<Binding>& env, const TypePtr& goal,
               int depth) {
    if (depth <= 0) return leaf(env, goal);
    double roll = rng_unit(rng_);
    if (roll < 0.25) return leaf(env, goal);
    // Try an application of an environment function returning `goal`.
    if (roll < 0.40) {
      std::vector<const Binding*> fns;
      for (const auto& b : env)
        if (b.type->tag == TyTag::Fun && type_equal(b.type->b, goal))
          fns.push_back(&b);
      if (!fns.empty()) {
        const Binding* f = fns[rng_below(rng_, fns.size())];
        return Expr::app(Expr::var(f->name), expr(env, f->type->a, depth - 1));
      }
    }
    if (roll < 0.50) {
      return Expr::if_(expr(env, Type::bools(), depth - 1),
                       expr(env, goal, depth - 1),
                       expr(env, goal, depth - 1));
    }
    if (roll < 0.62) {
      TypePtr aux = simple_type(1);
      std::string name = fresh_name();
      ExprPtr bound = expr(env, aux, depth - 1);
      auto env2 = env;
      env2.push_back({name, aux});
      return Expr::let(name, false, bound, expr(env2, goal, depth - 1));
    }
    switch (goal->tag) {
      case TyTag::Int:
        return Expr::plus(expr(env, Type::ints(), depth - 1),
                          expr(env, Type::ints(), depth - 1));
      case TyTag::List:
        if (rng_below(rng_, 4) == 0) return Expr::nil();
        return Expr::cons(expr(env, goal->a, depth - 1),
                          expr(env, goal, depth - 1));
      case TyTag::Prod:
        return Expr::pair(expr(env, goal->a, depth - 1),
                          expr(env, goal->b, depth - 1));
      case TyTag::Fun: {
        std::string param = fresh_name();
        auto env2 = env;
        env2.push_back({param, goal->a});
        return Expr::fun(param, expr(env2, goal->b, depth - 1));
      }
      default:
        return leaf(env, goal);
    }
  }

  ExprPtr leaf(const std::vector<Binding>& env, const TypePtr& goal) {
    std::vector<const Binding*> vars;
    for (const auto& b : env)
      if (type_equal(b.type, goal)) vars.push_back(&b);
    if (!vars.empty() && rng_unit(rng_) < 0.6)
      return Expr::var(vars[rng_below(rng_, vars.size())]->name);
    switch (goal->tag) {
      case TyTag::Int:
        return Expr::int_lit(static_cast<long long>(rng_below(rng_, 10)));
      case TyTag::Bool:
        return Expr::bool_lit(rng_below(rng_, 2) == 0);
      case TyTag::List:
        return Expr::nil();
      case TyTag::Prod:
        return Expr::pair(leaf(env, goal->a), leaf(env, goal->b));
      case TyTag::Fun: {
        std::string param = fresh_name();
        auto env2 = env;
        env2.push_back({param, goal->a});
        return Expr::fun(param, leaf(env2, goal->b));
      }
      default:
        return Expr::int_lit(0);
    }
  }

 private:
  RngEngine& rng_;
  int fresh_ = 0;

  std::string fresh_name() { return "v" + std::to_string(fresh_++); }

  std::string pick_name(std::vector<std::string> pool) {
    std::string n = pool[rng_below(rng_, pool.size())];
    if (rng_below(rng_, 3) == 0) n += std::to_string(fresh_++);
    return n;
  }
};

}  // namespace detail

// A well-typed closed program of at least `min_nodes` nodes.
inline Program gen_well_typed(RngEngine& rng, int min_nodes = 10) {
  detail::TermGen gen(rng);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Program p = program_from_tree(gen.program());
    if (p.size() < min_nodes) continue;
    if (infer_partial(p).well_typed) return p;
  }
  // The generator is correct by construction; reaching this means a bug.
  throw std::logic_error("failed to generate a well-typed program");
}

enum class MutationKind : uint8_t {
  ReplaceLiteral,  // int <-> bool <-> []
  SwapPlusCons,    // + <-> ::
  DropArgument,    // f x  ->  f
  WrapInList,      // e  ->  e :: []
};

inline const char* mutation_name(MutationKind k) {
  switch (k) {
    case MutationKind::ReplaceLiteral: return "replace-literal";
    case MutationKind::SwapPlusCons: return "swap-plus-cons";
    case MutationKind::DropArgument: return "drop-argument";
    case MutationKind::WrapInList: return "wrap-in-list";
  }
  return "?";
}

struct Mutation {
  Program bad;
  int blame = -1;  // node id in `bad` occupying the mutated position
  MutationKind kind;
};

// Applies one random type-breaking mutation; the result is guaranteed
// ill-typed (candidates that stay well-typed are skipped).
inline std::optional<Mutation> mutate(RngEngine& rng, const Program& p) {
  struct Cand {
    int id;
    MutationKind kind;
    int variant;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < p.size(); ++i) {
    switch (p.nodes[i].kind) {
      case ExprKind::IntLit:
        cands.push_back({i, MutationKind::ReplaceLiteral, 0});  // -> []
        cands.push_back({i, MutationKind::ReplaceLiteral, 1});  // -> bool
        break;
      case ExprKind::BoolLit:
        cands.push_back({i, MutationKind::ReplaceLiteral, 2});  // -> int
        break;
      case ExprKind::Nil:
        cands.push_back({i, MutationKind::ReplaceLiteral, 3});  // -> int
        break;
      case ExprKind::Plus:
        cands.push_back({i, MutationKind::SwapPlusCons, 0});
        break;
      case ExprKind::Cons:
        cands.push_back({i, MutationKind::SwapPlusCons, 1});
        break;
      case ExprKind::App:
        // Dropping the argument of `f x` is only a clean insertion-shaped
        // pair when `f` is not itself an application; otherwise the diff
        // descends through the matching App kinds instead.
        if (p.nodes[p.nodes[i].children[0]].kind != ExprKind::App)
          cands.push_back({i, MutationKind::DropArgument, 0});
        cands.push_back({i, MutationKind::WrapInList, 0});
        break;
      case ExprKind::Var:
        cands.push_back({i, MutationKind::WrapInList, 0});
        break;
      default:
        break;
    }
  }
  rng_shuffle(cands, rng);
  for (const Cand& c : cands) {
    ExprPtr old = to_tree(p, c.id);
    ExprPtr repl;
    switch (c.kind) {
      case MutationKind::ReplaceLiteral:
        switch (c.variant) {
          case 0: repl = Expr::nil(); break;
          case 1: repl = Expr::bool_lit(rng_below(rng, 2) == 0); break;
          default:
            repl = Expr::int_lit(static_cast<long long>(rng_below(rng, 10)));
            break;
        }
        break;
      case MutationKind::SwapPlusCons:
        repl = c.variant == 0 ? Expr::cons(old->children[0], old->children[1])
                              : Expr::plus(old->children[0], old->children[1]);
        break;
      case MutationKind::DropArgument:
        repl = old->children[0];
        break;
      case MutationKind::WrapInList:
        repl = Expr::cons(old, Expr::nil());
        break;
    }
    Program bad = replace_subtree(p, c.id, repl);
    if (!infer_partial(bad).well_typed)
      return Mutation{std::move(bad), c.id, c.kind};
  }
  return std::nullopt;
}

}  // namespace nate
