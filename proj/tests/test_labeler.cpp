#include <catch2/catch_amalgamated.hpp>

#include "nate/diff.hpp"
#include "nate/gen.hpp"
#include "nate/parse.hpp"

using namespace nate;

namespace {

ProgramPair mk(const std::string& bad, const std::string& fix) {
  return ProgramPair{parse(bad), parse(fix), ""};
}

int find_node(const Program& p, ExprKind k, int nth = 0) {
  for (int i = 0; i < p.size(); ++i)
    if (p.nodes[i].kind == k && nth-- == 0) return i;
  return -1;
}

}  // namespace

TEST_CASE("replacing the function marks only it") {
  auto labels = tree_diff(mk("f x", "g x"));
  CHECK(labels.changed == std::set<int>{1});
  CHECK(labels.diff_fraction == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("an insertion around an expression marks the wrapped node") {
  // bad `f x` fixed to `(f x) + 1`: the + now occupies the application's
  // position, so the application (not f or x) is blamed.
  auto labels = tree_diff(mk("f x", "f x + 1"));
  CHECK(labels.changed == std::set<int>{0});
}

TEST_CASE("deleting a wrapper marks the removed operator's node") {
  auto labels = tree_diff(mk("f x + 1", "f x"));
  CHECK(labels.changed == std::set<int>{0});
}

TEST_CASE("structurally equal pair has no changes") {
  auto labels = tree_diff(mk("let x = 1 in x + 2", "let x = 1 in x + 2"));
  CHECK(labels.changed.empty());
  CHECK(labels.diff_fraction == 0.0);
}

TEST_CASE("sumList fixed by replacing [] with 0 marks only the Nil") {
  ProgramPair pair = mk(
      "let rec sumList xs = match xs with [] -> [] | hd :: tl -> hd + "
      "sumList tl in sumList [1; 2]",
      "let rec sumList xs = match xs with [] -> 0 | hd :: tl -> hd + "
      "sumList tl in sumList [1; 2]");
  auto labels = tree_diff(pair);
  int nil = find_node(pair.bad, ExprKind::Nil);
  CHECK(labels.changed == std::set<int>{nil});
}

TEST_CASE("deep edits are localized") {
  auto labels =
      tree_diff(mk("if b then 1 + 2 else (x, 3)", "if b then 1 + 4 else (x, 3)"));
  Program bad = parse("if b then 1 + 2 else (x, 3)");
  int two = -1;
  for (int i = 0; i < bad.size(); ++i)
    if (bad.nodes[i].kind == ExprKind::IntLit && bad.nodes[i].value == 2)
      two = i;
  CHECK(labels.changed == std::set<int>{two});
}

TEST_CASE("single-mutation pairs are labeled exactly at the mutated node") {
  RngEngine rng(8891);
  int done = 0;
  while (done < 200) {
    Program good = gen_well_typed(rng);
    auto m = mutate(rng, good);
    if (!m) continue;
    ++done;
    ProgramPair pair{m->bad, good, ""};
    auto labels = tree_diff(pair);
    INFO(mutation_name(m->kind) << "\nbad: " << pretty(m->bad)
                                << "\nfix: " << pretty(good));
    CHECK(labels.changed == std::set<int>{m->blame});
  }
}

TEST_CASE("fixed threshold keeps small diffs") {
  // Fractions {1/9, 2/9, 5/9}: the last exceeds 0.40.
  std::vector<ProgramPair> corpus = {
      mk("1 + 2 + 3 + 4 + 5", "1 + 2 + 3 + 4 + 6"),
      mk("1 + 2 + 3 + 4 + 5", "1 + 2 + 3 + 9 + 6"),
      mk("1 + 2 + 3 + 4 + 5", "9 + 8 + 7 + 6 + 5"),
  };
  auto [kept, discarded] = filter_outliers(corpus, OutlierPolicy::fixed(0.40));
  REQUIRE(kept.size() == 2);
  REQUIRE(discarded.size() == 1);
  CHECK(tree_diff(discarded[0]).diff_fraction > 0.40);
}

TEST_CASE("sigma policy keeps everything when fractions are identical") {
  std::vector<ProgramPair> corpus;
  for (int i = 0; i < 5; ++i) corpus.push_back(mk("f x", "g x"));
  auto [kept, discarded] = filter_outliers(corpus, OutlierPolicy::sigma());
  CHECK(kept.size() == 5);
  CHECK(discarded.empty());
}

TEST_CASE("sigma policy rejects an empty corpus") {
  std::vector<ProgramPair> empty;
  CHECK_THROWS_AS(filter_outliers(empty, OutlierPolicy::sigma()),
                  EmptyCorpusError);
  // The fixed policy has nothing to compute and returns two empty sets.
  auto [kept, discarded] = filter_outliers(empty, OutlierPolicy::fixed(0.4));
  CHECK(kept.empty());
  CHECK(discarded.empty());
}

TEST_CASE("planted rewrites are discarded exactly") {
  // 1000 pairs over 9-node plus-chains; 140 planted rewrites change 4 of 5
  // literals (fraction 4/9 > 0.40), the rest change one (1/9).
  auto chain = [](int a, int b, int c, int d, int e) {
    return std::to_string(a) + " + " + std::to_string(b) + " + " +
           std::to_string(c) + " + " + std::to_string(d) + " + " +
           std::to_string(e);
  };
  std::vector<ProgramPair> corpus;
  std::set<size_t> planted;
  for (size_t i = 0; i < 1000; ++i) {
    if (i % 7 == 0 && planted.size() < 140) {
      planted.insert(i);
      corpus.push_back(mk(chain(1, 2, 3, 4, 5), chain(9, 8, 7, 6, 5)));
    } else {
      corpus.push_back(mk(chain(1, 2, 3, 4, 5), chain(1, 2, 3, 4, 6)));
    }
  }
  auto [kept, discarded] = filter_outliers(corpus, OutlierPolicy::fixed(0.40));
  CHECK(discarded.size() == planted.size());
  CHECK(kept.size() == corpus.size() - planted.size());
}
