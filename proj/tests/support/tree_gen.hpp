#pragma once

// Random builder-tree generator for the syntax property tests.  The trees are
// arbitrary (usually ill-typed and full of unbound names); they exist to
// exercise the printer/parser pair, not the type checker.  Holes are skipped
// because the parser rejects them by design.

#include <random>
#include <string>
#include <vector>

#include "nate/lang.hpp"

namespace testsupport {

inline nate::ExprPtr random_tree(std::mt19937_64& rng, int depth) {
  using nate::Expr;
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  static const std::vector<std::string> names = {"a", "b", "f", "g", "x",
                                                 "y", "z", "hd", "tl'"};
  auto name = [&] { return names[pick(static_cast<int>(names.size()))]; };
  if (depth <= 0) {
    switch (pick(4)) {
      case 0: return Expr::var(name());
      case 1: return Expr::int_lit(static_cast<long long>(rng() % 19) - 9);
      case 2: return Expr::bool_lit(pick(2) == 0);
      default: return Expr::nil();
    }
  }
  auto sub = [&] { return random_tree(rng, depth - 1); };
  switch (pick(13)) {
    case 0: return Expr::var(name());
    case 1: return Expr::int_lit(static_cast<long long>(rng() % 19) - 9);
    case 2: return Expr::bool_lit(pick(2) == 0);
    case 3: return Expr::nil();
    case 4: return Expr::fun(name(), sub());
    case 5: return Expr::app(sub(), sub());
    case 6: return Expr::let(name(), pick(2) == 0, sub(), sub());
    case 7: return Expr::plus(sub(), sub());
    case 8: return Expr::if_(sub(), sub(), sub());
    case 9: return Expr::pair(sub(), sub());
    case 10: return Expr::pair_case(sub(), name(), name(), sub());
    case 11: return Expr::cons(sub(), sub());
    default: return Expr::list_case(sub(), sub(), name(), name(), sub());
  }
}

}  // namespace testsupport
