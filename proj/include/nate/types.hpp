#pragma once

// Type syntax, substitutions, and Robinson unification with occurs check.
// Types are immutable shared trees; a substitution is a growable binding
// table over variable indices with an undo trail, so a failed unification
// rolls back cleanly and leaves the substitution as it was.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace nate {

enum class TyTag : uint8_t { Var, Int, Bool, Fun, Prod, List };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TyTag tag;
  int var = -1;   // TyTag::Var
  TypePtr a, b;   // Fun/Prod: both; List: a

  static TypePtr mk_var(int v) {
    auto t = std::make_shared<Type>();
    t->tag = TyTag::Var;
    t->var = v;
    return t;
  }
  static const TypePtr& ints() {
    static TypePtr t = [] {
      auto x = std::make_shared<Type>();
      x->tag = TyTag::Int;
      return x;
    }();
    return t;
  }
  static const TypePtr& bools() {
    static TypePtr t = [] {
      auto x = std::make_shared<Type>();
      x->tag = TyTag::Bool;
      return x;
    }();
    return t;
  }
  static TypePtr fun(TypePtr from, TypePtr to) {
    auto t = std::make_shared<Type>();
    t->tag = TyTag::Fun;
    t->a = std::move(from);
    t->b = std::move(to);
    return t;
  }
  static TypePtr prod(TypePtr l, TypePtr r) {
    auto t = std::make_shared<Type>();
    t->tag = TyTag::Prod;
    t->a = std::move(l);
    t->b = std::move(r);
    return t;
  }
  static TypePtr list(TypePtr elem) {
    auto t = std::make_shared<Type>();
    t->tag = TyTag::List;
    t->a = std::move(elem);
    return t;
  }
};

// Type constructor tags for the `mentions` abstraction; variables contribute
// nothing.
enum class TyCon : uint8_t { Int, Bool, Fun, Prod, List };
constexpr int kTyConCount = 5;

inline const char* tycon_name(TyCon c) {
  switch (c) {
    case TyCon::Int: return "int";
    case TyCon::Bool: return "bool";
    case TyCon::Fun: return "fun";
    case TyCon::Prod: return "pair";
    case TyCon::List: return "list";
  }
  return "?";
}

class Subst {
 public:
  int fresh() {
    bindings_.push_back(nullptr);
    return static_cast<int>(bindings_.size()) - 1;
  }
  TypePtr fresh_var() { return Type::mk_var(fresh()); }

  int var_count() const { return static_cast<int>(bindings_.size()); }

  const TypePtr& binding(int v) const { return bindings_[v]; }

  // Follows variable bindings until an unbound variable or a constructor.
  TypePtr resolve(TypePtr t) const {
    while (t->tag == TyTag::Var && bindings_[t->var]) t = bindings_[t->var];
    return t;
  }

  // Deep application of the current bindings.
  TypePtr apply(const TypePtr& t) const {
    TypePtr r = resolve(t);
    switch (r->tag) {
      case TyTag::Var:
      case TyTag::Int:
      case TyTag::Bool:
        return r;
      case TyTag::Fun: {
        TypePtr a = apply(r->a), b = apply(r->b);
        return a == r->a && b == r->b ? r : Type::fun(a, b);
      }
      case TyTag::Prod: {
        TypePtr a = apply(r->a), b = apply(r->b);
        return a == r->a && b == r->b ? r : Type::prod(a, b);
      }
      case TyTag::List: {
        TypePtr a = apply(r->a);
        return a == r->a ? r : Type::list(a);
      }
    }
    return r;
  }

  enum class UnifyResult { Ok, Clash, Occurs };

  // Most general unifier extending the current bindings.  On failure the
  // substitution is rolled back to its pre-call state.
  UnifyResult unify(const TypePtr& a, const TypePtr& b) {
    size_t mark = trail_.size();
    UnifyResult r = unify_rec(a, b);
    if (r != UnifyResult::Ok) {
      while (trail_.size() > mark) {
        bindings_[trail_.back()] = nullptr;
        trail_.pop_back();
      }
    }
    return r;
  }

  void free_vars(const TypePtr& t, std::set<int>& out) const {
    TypePtr r = resolve(t);
    switch (r->tag) {
      case TyTag::Var: out.insert(r->var); break;
      case TyTag::Fun:
      case TyTag::Prod:
        free_vars(r->a, out);
        free_vars(r->b, out);
        break;
      case TyTag::List: free_vars(r->a, out); break;
      default: break;
    }
  }

 private:
  std::vector<TypePtr> bindings_;
  std::vector<int> trail_;

  bool occurs(int v, const TypePtr& t) const {
    TypePtr r = resolve(t);
    switch (r->tag) {
      case TyTag::Var: return r->var == v;
      case TyTag::Fun:
      case TyTag::Prod:
        return occurs(v, r->a) || occurs(v, r->b);
      case TyTag::List: return occurs(v, r->a);
      default: return false;
    }
  }

  void bind(int v, const TypePtr& t) {
    bindings_[v] = t;
    trail_.push_back(v);
  }

  UnifyResult unify_rec(const TypePtr& ta, const TypePtr& tb) {
    TypePtr a = resolve(ta), b = resolve(tb);
    if (a->tag == TyTag::Var && b->tag == TyTag::Var && a->var == b->var)
      return UnifyResult::Ok;
    if (a->tag == TyTag::Var) {
      if (occurs(a->var, b)) return UnifyResult::Occurs;
      bind(a->var, b);
      return UnifyResult::Ok;
    }
    if (b->tag == TyTag::Var) {
      if (occurs(b->var, a)) return UnifyResult::Occurs;
      bind(b->var, a);
      return UnifyResult::Ok;
    }
    if (a->tag != b->tag) return UnifyResult::Clash;
    switch (a->tag) {
      case TyTag::Int:
      case TyTag::Bool:
        return UnifyResult::Ok;
      case TyTag::Fun:
      case TyTag::Prod: {
        UnifyResult r = unify_rec(a->a, b->a);
        return r == UnifyResult::Ok ? unify_rec(a->b, b->b) : r;
      }
      case TyTag::List:
        return unify_rec(a->a, b->a);
      default:
        return UnifyResult::Clash;
    }
  }
};

inline void type_mentions_rec(const TypePtr& t, std::set<TyCon>& out) {
  switch (t->tag) {
    case TyTag::Var: break;
    case TyTag::Int: out.insert(TyCon::Int); break;
    case TyTag::Bool: out.insert(TyCon::Bool); break;
    case TyTag::Fun:
      out.insert(TyCon::Fun);
      type_mentions_rec(t->a, out);
      type_mentions_rec(t->b, out);
      break;
    case TyTag::Prod:
      out.insert(TyCon::Prod);
      type_mentions_rec(t->a, out);
      type_mentions_rec(t->b, out);
      break;
    case TyTag::List:
      out.insert(TyCon::List);
      type_mentions_rec(t->a, out);
      break;
  }
}

// The set of type constructors occurring anywhere in t.
inline std::set<TyCon> type_mentions(const TypePtr& t) {
  std::set<TyCon> out;
  type_mentions_rec(t, out);
  return out;
}

namespace detail {

inline void show_type_rec(const TypePtr& t, std::map<int, int>& names,
                          std::string& out, int prec) {
  // prec: 0 = open, 1 = argument of ->, 2 = argument of * / list elem
  switch (t->tag) {
    case TyTag::Var: {
      auto [it, inserted] = names.emplace(t->var, names.size());
      int i = it->second;
      out += '\'';
      out += static_cast<char>('a' + i % 26);
      if (i >= 26) out += std::to_string(i / 26);
      break;
    }
    case TyTag::Int: out += "int"; break;
    case TyTag::Bool: out += "bool"; break;
    case TyTag::Fun: {
      bool paren = prec >= 1;
      if (paren) out += '(';
      show_type_rec(t->a, names, out, 1);
      out += " -> ";
      show_type_rec(t->b, names, out, 0);
      if (paren) out += ')';
      break;
    }
    case TyTag::Prod: {
      bool paren = prec >= 2;
      if (paren) out += '(';
      show_type_rec(t->a, names, out, 2);
      out += " * ";
      show_type_rec(t->b, names, out, 2);
      if (paren) out += ')';
      break;
    }
    case TyTag::List: {
      show_type_rec(t->a, names, out, 2);
      out += " list";
      break;
    }
  }
}

}  // namespace detail

// Display with variables renamed 'a, 'b, ... in order of first occurrence.
inline std::string show_type(const TypePtr& t) {
  std::map<int, int> names;
  std::string out;
  detail::show_type_rec(t, names, out, 0);
  return out;
}

// Canonical key for comparing a group of types across inference runs whose
// fresh-variable numbering differs; variables are renamed jointly, in order
// of first occurrence over the whole group.
inline std::string canon_types(const std::vector<TypePtr>& ts) {
  std::map<int, int> names;
  std::string out;
  for (const auto& t : ts) {
    detail::show_type_rec(t, names, out, 0);
    out += '|';
  }
  return out;
}

inline bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case TyTag::Var: return a->var == b->var;
    case TyTag::Int:
    case TyTag::Bool:
      return true;
    case TyTag::Fun:
    case TyTag::Prod:
      return type_equal(a->a, b->a) && type_equal(a->b, b->b);
    case TyTag::List:
      return type_equal(a->a, b->a);
  }
  return false;
}

}  // namespace nate
