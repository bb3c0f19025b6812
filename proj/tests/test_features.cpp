#include <catch2/catch_amalgamated.hpp>
#include <map>

#include "nate/features.hpp"
#include "nate/gen.hpp"
#include "nate/parse.hpp"

using namespace nate;

namespace {

const char* kSumList =
    "let rec sumList xs =\n"
    "  match xs with\n"
    "  | [] -> []\n"
    "  | hd :: tl -> hd + sumList tl\n";

int find_node(const Program& p, ExprKind k, int nth = 0) {
  for (int i = 0; i < p.size(); ++i)
    if (p.nodes[i].kind == k && nth-- == 0) return i;
  return -1;
}

std::map<int, Sample> by_node(const std::vector<Sample>& samples) {
  std::map<int, Sample> m;
  for (const auto& s : samples) m[s.node] = s;
  return m;
}

}  // namespace

TEST_CASE("schema width matches the counting formula") {
  const FeatureSchema& s = schema();
  int syn = kExprKindCount, ty = kTyConCount;
  CHECK(s.width() == syn + 4 * syn + (1 + 4) * ty + 1 + 1);
  CHECK(s.width() == 97);
  CHECK(s.count(FeatureGroup::LocalSyn) == syn);
  CHECK(s.count(FeatureGroup::CtxSyn) == 4 * syn);
  CHECK(s.count(FeatureGroup::Type) == 5 * ty);
  CHECK(s.count(FeatureGroup::Size) == 1);
  CHECK(s.count(FeatureGroup::Slice) == 1);
  // Names are unique and the order is pinned at both ends.
  std::set<std::string> names;
  for (const auto& f : s.features) names.insert(f.name);
  CHECK(names.size() == static_cast<size_t>(s.width()));
  CHECK(s.features.front().name == "is-var");
  CHECK(s.features.back().name == "in-slice");
  CHECK(s.version == "lml97-v1");
  // The same counting formula over a 45-class / 11-constructor surface
  // yields the familiar 282-wide layout.
  CHECK(45 + 4 * 45 + (1 + 4) * 11 + 1 + 1 == 282);
}

TEST_CASE("sumList features reproduce the reference rows") {
  Program bad = parse(kSumList);
  auto deriv = infer_partial(bad);
  auto slices = minimal_slices(bad);
  auto samples = extract_program(bad, deriv, slices, {}, /*filter=*/false);
  REQUIRE(samples.size() == static_cast<size_t>(bad.size()));
  auto rows = by_node(samples);

  const FeatureSchema& s = schema();
  int is_nil = s.index_of("is-[]");
  int is_case_list_p = s.index_of("is-case-list-p");
  int size = s.index_of("size");
  int has_int_c1 = s.index_of("has-type-int-c1");
  int has_list = s.index_of("has-type-list");
  int in_slice = s.index_of("in-slice");
  REQUIRE(is_nil >= 0);
  REQUIRE(is_case_list_p >= 0);
  REQUIRE(has_int_c1 >= 0);
  REQUIRE(has_list >= 0);

  int nil = find_node(bad, ExprKind::Nil);
  int plus = find_node(bad, ExprKind::Plus);
  int app = find_node(bad, ExprKind::App);
  int tl = bad.at(app).children[1];

  auto row = [&](int node, int f) { return rows.at(node).values[f]; };

  // []          -> 1, 1, 1, 0, 1, 1
  CHECK(row(nil, is_nil) == 1.0);
  CHECK(row(nil, is_case_list_p) == 1.0);
  CHECK(row(nil, size) == 1.0);
  CHECK(row(nil, has_int_c1) == 0.0);
  CHECK(row(nil, has_list) == 1.0);
  CHECK(row(nil, in_slice) == 1.0);
  // hd + sumList tl -> 0, 1, 5, 1, 0, 1
  CHECK(row(plus, is_nil) == 0.0);
  CHECK(row(plus, is_case_list_p) == 1.0);
  CHECK(row(plus, size) == 5.0);
  CHECK(row(plus, has_int_c1) == 1.0);
  CHECK(row(plus, has_list) == 0.0);
  CHECK(row(plus, in_slice) == 1.0);
  // sumList tl  -> 0, 0, 3, 0, 1, 1
  CHECK(row(app, is_nil) == 0.0);
  CHECK(row(app, is_case_list_p) == 0.0);
  CHECK(row(app, size) == 3.0);
  CHECK(row(app, has_int_c1) == 0.0);
  CHECK(row(app, has_list) == 1.0);
  CHECK(row(app, in_slice) == 1.0);
  // tl          -> 0, 0, 1, 0, 1, 0
  CHECK(row(tl, is_nil) == 0.0);
  CHECK(row(tl, is_case_list_p) == 0.0);
  CHECK(row(tl, size) == 1.0);
  CHECK(row(tl, has_int_c1) == 0.0);
  CHECK(row(tl, has_list) == 1.0);
  CHECK(row(tl, in_slice) == 0.0);
}

TEST_CASE("slice filtering drops tl and only emits slice members") {
  Program bad = parse(kSumList);
  auto deriv = infer_partial(bad);
  auto slices = minimal_slices(bad);
  auto samples = extract_program(bad, deriv, slices, {}, /*filter=*/true);
  int in_slice = schema().index_of("in-slice");
  int app = find_node(bad, ExprKind::App);
  int tl = bad.at(app).children[1];
  for (const auto& s : samples) {
    CHECK(s.node != tl);
    CHECK(s.values[in_slice] == 1.0);
  }
  CHECK(samples.size() < static_cast<size_t>(bad.size()));
}

TEST_CASE("exactly one local bit, at most one bit per context block") {
  RngEngine rng(5150);
  for (int trial = 0; trial < 40; ++trial) {
    Program good = gen_well_typed(rng);
    auto m = mutate(rng, good);
    if (!m) continue;
    auto deriv = infer_partial(m->bad);
    auto slices = minimal_slices(m->bad);
    auto samples = extract_program(m->bad, deriv, slices, {}, false);
    for (const auto& s : samples) {
      REQUIRE(s.values.size() == static_cast<size_t>(schema().width()));
      double local = 0;
      for (int i = 0; i < kExprKindCount; ++i) local += s.values[i];
      CHECK(local == 1.0);
      for (int block = 0; block < 4; ++block) {
        double bits = 0;
        for (int i = 0; i < kExprKindCount; ++i)
          bits += s.values[kExprKindCount * (1 + block) + i];
        CHECK(bits <= 1.0);
      }
      CHECK(s.values[schema().index_of("size")] >= 1.0);
    }
  }
}

TEST_CASE("single-node programs have all contextual features disabled") {
  Program bad = parse("x");  // unbound: ill-typed single node
  auto deriv = infer_partial(bad);
  REQUIRE(!deriv.well_typed);
  auto slices = minimal_slices(bad);
  auto samples = extract_program(bad, deriv, slices, {}, true);
  REQUIRE(samples.size() == 1);
  const auto& v = samples[0].values;
  for (int i = kExprKindCount; i < 5 * kExprKindCount; ++i)
    CHECK(v[i] == 0.0);
  // no children, no parent: all context typing blocks empty too
  for (int i = 0; i < 4 * kTyConCount; ++i)
    CHECK(v[5 * kExprKindCount + kTyConCount + i] == 0.0);
}

TEST_CASE("labels come from the changed set") {
  Program bad = parse(kSumList);
  Program fix = parse(
      "let rec sumList xs = match xs with [] -> 0 | hd :: tl -> hd + sumList "
      "tl in sumList");
  ProgramPair pair{bad, fix, ""};
  auto labels = tree_diff(pair);
  auto slices = minimal_slices(bad);
  auto samples = extract(pair, slices, labels, false);
  int nil = find_node(bad, ExprKind::Nil);
  for (const auto& s : samples) CHECK(s.label == (s.node == nil));
}

TEST_CASE("masks select feature groups, local syntax always included") {
  auto local_only = mask_for_groups({});
  CHECK(local_only.width() == kExprKindCount);
  auto with_type = mask_for_groups({FeatureGroup::Type});
  CHECK(with_type.width() == kExprKindCount + 5 * kTyConCount);
  auto all = full_mask();
  CHECK(all.width() == schema().width());
  std::vector<double> full(schema().width());
  for (size_t i = 0; i < full.size(); ++i) full[i] = static_cast<double>(i);
  auto picked = with_type.apply(full);
  CHECK(picked.size() == static_cast<size_t>(with_type.width()));
  CHECK(picked[0] == 0.0);
}

TEST_CASE("extraction is deterministic") {
  Program bad = parse(kSumList);
  auto deriv = infer_partial(bad);
  auto slices = minimal_slices(bad);
  auto a = extract_program(bad, deriv, slices, {}, false);
  auto b = extract_program(bad, deriv, slices, {}, false);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].node == b[i].node);
    CHECK(a[i].values == b[i].values);
  }
  // Pre-order emission.
  for (size_t i = 1; i < a.size(); ++i) CHECK(a[i].node > a[i - 1].node);
}
