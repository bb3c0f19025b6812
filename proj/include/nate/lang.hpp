#pragma once

// Abstract syntax for the small ML-like language the workbench operates on,
// plus the node-identity and navigation services built on top of it.
//
// Two representations are used throughout:
//   * Expr      -- an immutable builder tree, convenient for construction
//                  and structural surgery (subtrees are shared).
//   * Program   -- a flattened view where node ids are dense pre-order
//                  indices into a vector.  Every analysis works on this.

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nate/errors.hpp"

namespace nate {

struct Span {
  uint32_t lo = 0;
  uint32_t hi = 0;
  friend bool operator==(const Span& a, const Span& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
  bool contains(const Span& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
};

enum class ExprKind : uint8_t {
  Var,
  Fun,
  App,
  Let,
  IntLit,
  Plus,
  BoolLit,
  If,
  Pair,
  PairCase,
  Nil,
  Cons,
  ListCase,
  Hole,
};

constexpr int kExprKindCount = 14;

inline const char* kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::Var: return "var";
    case ExprKind::Fun: return "fun";
    case ExprKind::App: return "app";
    case ExprKind::Let: return "let";
    case ExprKind::IntLit: return "int";
    case ExprKind::Plus: return "+";
    case ExprKind::BoolLit: return "bool";
    case ExprKind::If: return "if";
    case ExprKind::Pair: return "pair";
    case ExprKind::PairCase: return "case-pair";
    case ExprKind::Nil: return "[]";
    case ExprKind::Cons: return "::";
    case ExprKind::ListCase: return "case-list";
    case ExprKind::Hole: return "hole";
  }
  return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Builder tree.  `span` is filled by the parser and ignored (recomputed)
// everywhere else.
struct Expr {
  ExprKind kind;
  std::string name;                   // Var name, Fun param, Let binder
  long long value = 0;                // IntLit
  bool flag = false;                  // BoolLit value / Let rec flag
  std::vector<std::string> binders;   // PairCase {a,b}, ListCase {hd,tl}
  std::vector<ExprPtr> children;
  Span span;

  static ExprPtr var(std::string n) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->name = std::move(n);
    return e;
  }
  static ExprPtr fun(std::string param, ExprPtr body) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Fun;
    e->name = std::move(param);
    e->children = {std::move(body)};
    return e;
  }
  static ExprPtr app(ExprPtr f, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::App;
    e->children = {std::move(f), std::move(a)};
    return e;
  }
  static ExprPtr let(std::string n, bool rec, ExprPtr bound, ExprPtr body) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Let;
    e->name = std::move(n);
    e->flag = rec;
    e->children = {std::move(bound), std::move(body)};
    return e;
  }
  static ExprPtr int_lit(long long v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::IntLit;
    e->value = v;
    return e;
  }
  static ExprPtr plus(ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Plus;
    e->children = {std::move(l), std::move(r)};
    return e;
  }
  static ExprPtr bool_lit(bool v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::BoolLit;
    e->flag = v;
    return e;
  }
  static ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr f) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::If;
    e->children = {std::move(c), std::move(t), std::move(f)};
    return e;
  }
  static ExprPtr pair(ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Pair;
    e->children = {std::move(l), std::move(r)};
    return e;
  }
  static ExprPtr pair_case(ExprPtr scrut, std::string a, std::string b,
                           ExprPtr body) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::PairCase;
    e->binders = {std::move(a), std::move(b)};
    e->children = {std::move(scrut), std::move(body)};
    return e;
  }
  static ExprPtr nil() {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Nil;
    return e;
  }
  static ExprPtr cons(ExprPtr h, ExprPtr t) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Cons;
    e->children = {std::move(h), std::move(t)};
    return e;
  }
  static ExprPtr list_case(ExprPtr scrut, ExprPtr nil_body, std::string hd,
                           std::string tl, ExprPtr cons_body) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::ListCase;
    e->binders = {std::move(hd), std::move(tl)};
    e->children = {std::move(scrut), std::move(nil_body), std::move(cons_body)};
    return e;
  }
  static ExprPtr hole() {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Hole;
    return e;
  }
};

inline bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.value != b.value ||
      a.flag != b.flag || a.binders != b.binders ||
      a.children.size() != b.children.size())
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!expr_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

// Flattened node.  Ids are pre-order indices, so the subtree rooted at id
// occupies the contiguous range [id, id + subtree_size).
struct Node {
  ExprKind kind;
  Span span;
  int32_t parent = -1;
  uint32_t subtree_size = 1;
  std::vector<int32_t> children;
  std::string name;
  long long value = 0;
  bool flag = false;
  std::vector<std::string> binders;
};

struct Program {
  std::string source;
  std::vector<Node> nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  const Node& at(int id) const {
    if (id < 0 || id >= size()) throw UnknownNodeError(id);
    return nodes[id];
  }
  bool in_subtree(int id, int root) const {
    return root <= id && id < root + static_cast<int>(nodes[root].subtree_size);
  }
};

namespace detail {

inline int flatten_rec(const Expr& e, int parent, Program& out) {
  int id = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();
  {
    Node& n = out.nodes.back();
    n.kind = e.kind;
    n.span = e.span;
    n.parent = parent;
    n.name = e.name;
    n.value = e.value;
    n.flag = e.flag;
    n.binders = e.binders;
  }
  for (const auto& c : e.children) {
    int cid = flatten_rec(*c, id, out);
    out.nodes[id].children.push_back(cid);
  }
  out.nodes[id].subtree_size =
      static_cast<uint32_t>(out.nodes.size()) - static_cast<uint32_t>(id);
  return id;
}

}  // namespace detail

// Flattens a builder tree whose spans are already set (parser output).
inline Program flatten(const ExprPtr& root, std::string source) {
  Program p;
  p.source = std::move(source);
  detail::flatten_rec(*root, -1, p);
  return p;
}

inline ExprPtr to_tree(const Program& p, int id = 0) {
  const Node& n = p.at(id);
  auto e = std::make_shared<Expr>();
  e->kind = n.kind;
  e->name = n.name;
  e->value = n.value;
  e->flag = n.flag;
  e->binders = n.binders;
  e->span = n.span;
  for (int c : n.children) e->children.push_back(to_tree(p, c));
  return e;
}

inline bool program_equal(const Program& a, const Program& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    const Node& x = a.nodes[i];
    const Node& y = b.nodes[i];
    if (x.kind != y.kind || x.name != y.name || x.value != y.value ||
        x.flag != y.flag || x.binders != y.binders ||
        x.children != y.children)
      return false;
  }
  return true;
}

struct Navigation {
  std::optional<int> parent;
  std::vector<int> children;
};

inline Navigation navigate(const Program& p, int id) {
  const Node& n = p.at(id);
  Navigation nav;
  if (n.parent >= 0) nav.parent = n.parent;
  nav.children.assign(n.children.begin(), n.children.end());
  return nav;
}

// ---------------------------------------------------------------------------
// Rendering.  The renderer is also how flattened programs get their spans
// when they were not produced by the parser: it emits canonical text and
// records the byte range of every node as it goes.

namespace detail {

// Precedence levels, loosest to tightest.  A child is parenthesized when its
// own level is below what its position requires.
inline int expr_level(ExprKind k) {
  switch (k) {
    case ExprKind::Let:
    case ExprKind::Fun:
    case ExprKind::If:
    case ExprKind::PairCase:
    case ExprKind::ListCase:
      return 0;
    case ExprKind::Cons: return 1;
    case ExprKind::Plus: return 2;
    case ExprKind::App: return 3;
    default: return 4;  // atoms
  }
}

inline bool is_match(ExprKind k) {
  return k == ExprKind::PairCase || k == ExprKind::ListCase;
}

struct Renderer {
  std::string text;
  // Pre-order spans, recorded if `record` is set.
  std::vector<Span>* spans = nullptr;

  void emit(const std::string& s) { text += s; }

  // `min_level`: parenthesize unless expr_level >= min_level.
  // `guard_bar`: the expression is followed by a '|' in the output, so a
  // match form (whose arm list would swallow it) must be parenthesized.
  void render(const Expr& e, int min_level, bool guard_bar) {
    bool parens = expr_level(e.kind) < min_level ||
                  (guard_bar && is_match(e.kind));
    if (parens) emit("(");
    size_t slot = 0;
    if (spans) {
      slot = spans->size();
      spans->push_back({});
      (*spans)[slot].lo = static_cast<uint32_t>(text.size());
    }
    render_body(e, parens ? false : guard_bar);
    if (spans) (*spans)[slot].hi = static_cast<uint32_t>(text.size());
    if (parens) emit(")");
  }

  void render_body(const Expr& e, bool guard_bar) {
    switch (e.kind) {
      case ExprKind::Var:
        emit(e.name);
        break;
      case ExprKind::IntLit:
        emit(std::to_string(e.value));
        break;
      case ExprKind::BoolLit:
        emit(e.flag ? "true" : "false");
        break;
      case ExprKind::Nil:
        emit("[]");
        break;
      case ExprKind::Hole:
        emit("??");
        break;
      case ExprKind::Fun:
        emit("fun " + e.name + " -> ");
        render(*e.children[0], 0, guard_bar);
        break;
      case ExprKind::App:
        render(*e.children[0], 3, true);
        emit(" ");
        render(*e.children[1], 4, true);
        break;
      case ExprKind::Let:
        emit(e.flag ? "let rec " : "let ");
        emit(e.name + " = ");
        render(*e.children[0], 0, true);
        emit(" in ");
        render(*e.children[1], 0, guard_bar);
        break;
      case ExprKind::Plus:
        render(*e.children[0], 2, true);
        emit(" + ");
        render(*e.children[1], 3, true);
        break;
      case ExprKind::If:
        emit("if ");
        render(*e.children[0], 0, true);
        emit(" then ");
        render(*e.children[1], 0, true);
        emit(" else ");
        render(*e.children[2], 0, guard_bar);
        break;
      case ExprKind::Pair:
        emit("(");
        render(*e.children[0], 0, false);
        emit(", ");
        render(*e.children[1], 0, false);
        emit(")");
        break;
      case ExprKind::Cons:
        render(*e.children[0], 2, true);
        emit(" :: ");
        render(*e.children[1], 1, guard_bar);
        break;
      case ExprKind::PairCase:
        emit("match ");
        render(*e.children[0], 1, true);
        emit(" with (" + e.binders[0] + ", " + e.binders[1] + ") -> ");
        render(*e.children[1], 0, guard_bar);
        break;
      case ExprKind::ListCase:
        emit("match ");
        render(*e.children[0], 1, true);
        emit(" with [] -> ");
        render(*e.children[1], 0, true);
        emit(" | " + e.binders[0] + " :: " + e.binders[1] + " -> ");
        render(*e.children[2], 0, guard_bar);
        break;
    }
  }
};

}  // namespace detail

// Canonical text for a builder tree.
inline std::string render_expr(const Expr& e) {
  detail::Renderer r;
  r.render(e, 0, false);
  return r.text;
}

// Builds a Program from a builder tree: renders canonical text and assigns
// spans into it.  The renderer's span order is pre-order, matching flatten.
inline Program program_from_tree(const ExprPtr& root) {
  detail::Renderer r;
  std::vector<Span> spans;
  r.spans = &spans;
  r.render(*root, 0, false);
  Program p;
  p.source = std::move(r.text);
  detail::flatten_rec(*root, -1, p);
  assert(spans.size() == p.nodes.size());
  for (size_t i = 0; i < spans.size(); ++i) p.nodes[i].span = spans[i];
  return p;
}

inline std::string pretty(const Program& p) { return render_expr(*to_tree(p)); }

// Replaces the subtree at `id` with `replacement`.  The new program's source
// is the old source with the replaced byte range spliced out; node ids are
// recomputed as pre-order (everything before `id` keeps its id, everything
// after shifts by the size delta).
inline Program replace_subtree(const Program& p, int id,
                               const ExprPtr& replacement) {
  const Node& victim = p.at(id);
  const int sz = static_cast<int>(victim.subtree_size);
  const int n_old = p.size();

  // Render the replacement standalone; parenthesize unconditionally so the
  // splice is syntactically inert in any context.
  detail::Renderer r;
  std::vector<Span> repl_spans;
  r.spans = &repl_spans;
  r.emit("(");
  r.render(*replacement, 0, false);
  r.emit(")");

  Program repl_flat;
  detail::flatten_rec(*replacement, -1, repl_flat);
  const int n_repl = repl_flat.size();
  assert(static_cast<int>(repl_spans.size()) == n_repl);

  const uint32_t cut_lo = victim.span.lo;
  const uint32_t cut_hi = victim.span.hi;
  const int64_t byte_delta =
      static_cast<int64_t>(r.text.size()) - (cut_hi - cut_lo);
  const int node_delta = n_repl - sz;

  Program out;
  out.source = p.source.substr(0, cut_lo) + r.text + p.source.substr(cut_hi);
  out.nodes.reserve(n_old + node_delta);

  // Reference positions only ever hold ids outside (id, id+sz): the victim's
  // slot stays `id` (now the replacement root), later ids shift.
  auto remap = [&](int32_t j) -> int32_t {
    return j <= id ? j : j + node_delta;
  };

  for (int i = 0; i < id; ++i) {
    Node n = p.nodes[i];
    for (auto& c : n.children) c = remap(c);
    if (p.in_subtree(id, i))  // ancestor of the replaced subtree
      n.subtree_size = static_cast<uint32_t>(n.subtree_size + node_delta);
    // Spans: ancestors stretch, nodes fully before are untouched.
    if (n.span.hi >= cut_hi)
      n.span.hi = static_cast<uint32_t>(n.span.hi + byte_delta);
    out.nodes.push_back(std::move(n));
  }
  for (int i = 0; i < n_repl; ++i) {
    Node n = repl_flat.nodes[i];
    for (auto& c : n.children) c += id;
    n.parent = i == 0 ? victim.parent : n.parent + id;
    n.span = {repl_spans[i].lo + cut_lo, repl_spans[i].hi + cut_lo};
    // The replacement root keeps the surrounding parens inside its span.
    if (i == 0) n.span = {cut_lo, static_cast<uint32_t>(cut_lo + r.text.size())};
    out.nodes.push_back(std::move(n));
  }
  for (int i = id + sz; i < n_old; ++i) {
    Node n = p.nodes[i];
    n.parent = remap(n.parent);
    for (auto& c : n.children) c = remap(c);
    n.span = {static_cast<uint32_t>(n.span.lo + byte_delta),
              static_cast<uint32_t>(n.span.hi + byte_delta)};
    out.nodes.push_back(std::move(n));
  }
  return out;
}

// One node per line: `(id kind lo..hi ...children)`, indented by depth.
inline std::string dump_sexp(const Program& p) {
  std::string out;
  std::vector<int> depth(p.size(), 0);
  for (int i = 0; i < p.size(); ++i) {
    const Node& n = p.nodes[i];
    if (n.parent >= 0) depth[i] = depth[n.parent] + 1;
    out.append(static_cast<size_t>(2 * depth[i]), ' ');
    out += "(" + std::to_string(i) + " " + kind_name(n.kind);
    if (n.kind == ExprKind::Var || n.kind == ExprKind::Fun ||
        n.kind == ExprKind::Let)
      out += " " + n.name;
    if (n.kind == ExprKind::IntLit) out += " " + std::to_string(n.value);
    if (n.kind == ExprKind::BoolLit) out += n.flag ? " true" : " false";
    out += " " + std::to_string(n.span.lo) + ".." + std::to_string(n.span.hi);
    bool leaf = n.children.empty();
    out += leaf ? ")" : "";
    // Close parens for finished ancestors.
    int j = i;
    while (leaf && j >= 0) {
      int par = p.nodes[j].parent;
      if (par < 0) break;
      if (p.nodes[par].children.back() != j) break;
      out += ")";
      j = par;
    }
    out += "\n";
  }
  return out;
}

}  // namespace nate
