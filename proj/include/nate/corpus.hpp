#pragma once

// Corpus files are JSON Lines: one object per (ill-typed, fixed) pair,
//   {"bad": <source>, "fix": <source>, "meta": {...}}
// The generator substitutes for a recorded trace corpus: it samples
// well-typed programs, applies one type-breaking mutation, and emits
// (mutated, original) with the mutation kind and ground-truth blame node in
// meta.  A fixed seed reproduces the corpus byte for byte.

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nate/diff.hpp"
#include "nate/gen.hpp"
#include "nate/parse.hpp"

namespace nate {

struct GenSpec {
  int count = 100;
  uint64_t seed = 42;
  int min_nodes = 10;
};

inline std::vector<ProgramPair> generate_corpus(const GenSpec& spec) {
  RngEngine rng(spec.seed);
  std::vector<ProgramPair> out;
  while (static_cast<int>(out.size()) < spec.count) {
    Program good = gen_well_typed(rng, spec.min_nodes);
    auto m = mutate(rng, good);
    if (!m) continue;
    nlohmann::ordered_json meta;
    meta["mutation"] = mutation_name(m->kind);
    meta["blame"] = m->blame;
    out.push_back(ProgramPair{std::move(m->bad), std::move(good), meta.dump()});
  }
  return out;
}

inline std::string corpus_to_jsonl(const std::vector<ProgramPair>& corpus) {
  std::string out;
  for (const auto& pair : corpus) {
    nlohmann::ordered_json j;
    j["bad"] = pair.bad.source;
    j["fix"] = pair.fix.source;
    j["meta"] = pair.meta.empty() ? nlohmann::ordered_json::object()
                                  : nlohmann::ordered_json::parse(pair.meta);
    out += j.dump();
    out += '\n';
  }
  return out;
}

// Parses a JSONL corpus.  With `validate`, each pair must satisfy the
// corpus invariants (bad ill-typed, fix well-typed); violations carry the
// 1-based line number.
inline std::vector<ProgramPair> corpus_from_jsonl(const std::string& text,
                                                  bool validate = true) {
  std::vector<ProgramPair> out;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw CorpusFormatError(lineno, e.what());
    }
    if (!j.contains("bad") || !j.contains("fix"))
      throw CorpusFormatError(lineno, "missing \"bad\" or \"fix\"");
    ProgramPair pair;
    try {
      pair.bad = parse(j["bad"].get<std::string>());
      pair.fix = parse(j["fix"].get<std::string>());
    } catch (const SyntaxError& e) {
      throw CorpusFormatError(lineno, e.what());
    }
    if (j.contains("meta")) pair.meta = j["meta"].dump();
    if (validate) {
      if (infer_partial(pair.bad).well_typed)
        throw CorpusFormatError(lineno, "\"bad\" program is well-typed");
      if (!infer_partial(pair.fix).well_typed)
        throw CorpusFormatError(lineno, "\"fix\" program is ill-typed");
    }
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace nate
