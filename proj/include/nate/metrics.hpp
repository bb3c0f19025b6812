#pragma once

// Evaluation metrics and the report structure.  Top-k accuracy counts a
// program as a hit when any truly-changed node appears among the k highest
// ranked predictions (exact node identity by default; span overlap behind a
// flag).  Recall is micro-averaged |top-3 ∩ oracle| / |oracle| with the
// oracle restricted to changed nodes inside the slice; programs whose
// restricted oracle is empty are skipped for recall but still count toward
// accuracy.

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nate/blame.hpp"

namespace nate {

inline bool spans_overlap(const Span& a, const Span& b) {
  return a.lo < b.hi && b.lo < a.hi;
}

// Rank (1-based) of the first prediction that hits the changed set; 0 when
// none does.
inline int hit_rank(const BlameReport& report, const Program& p,
                    const std::set<int>& changed, bool span_overlap = false) {
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const BlameEntry& e = report.entries[i];
    if (changed.count(e.node)) return static_cast<int>(i) + 1;
    if (span_overlap)
      for (int c : changed)
        if (spans_overlap(e.span, p.at(c).span))
          return static_cast<int>(i) + 1;
  }
  return 0;
}

inline double top_k_accuracy(const std::vector<int>& hit_ranks, int k) {
  if (hit_ranks.empty()) return 0.0;
  int hits = 0;
  for (int r : hit_ranks) hits += r > 0 && r <= k;
  return static_cast<double>(hits) / hit_ranks.size();
}

struct RecallAccumulator {
  long long numer = 0, denom = 0;
  int skipped = 0, counted = 0;

  void add(const BlameReport& report, const std::set<int>& changed,
           const std::set<int>& slice_union) {
    std::set<int> oracle;
    for (int c : changed)
      if (slice_union.count(c)) oracle.insert(c);
    if (oracle.empty()) {
      ++skipped;
      return;
    }
    ++counted;
    for (const auto& e : report.entries)
      numer += oracle.count(e.node);
    denom += static_cast<long long>(oracle.size());
  }

  double value() const {
    return denom == 0 ? 0.0 : static_cast<double>(numer) / denom;
  }
};

struct BaselineRow {
  std::string name;
  double top1 = 0, top2 = 0, top3 = 0, recall = 0;
};

struct EvalReport {
  double top1 = 0, top2 = 0, top3 = 0;
  double recall = 0;
  int total_programs = 0;   // test programs scored for accuracy
  int evaluated = 0;        // programs entering the recall average
  int skipped = 0;          // recall-skipped (empty slice-restricted oracle)
  double labels_in_slice_fraction = 0;  // changed nodes that lie in a slice
  double mean_slice_ratio = 0;          // mean |slice union| / |nodes|
  double label_imbalance = 0;           // fraction of blame-labeled samples
  std::vector<BaselineRow> baselines;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["top1"] = top1;
    j["top2"] = top2;
    j["top3"] = top3;
    j["recall"] = recall;
    j["total_programs"] = total_programs;
    j["evaluated"] = evaluated;
    j["skipped"] = skipped;
    j["labels_in_slice_fraction"] = labels_in_slice_fraction;
    j["mean_slice_ratio"] = mean_slice_ratio;
    j["label_imbalance"] = label_imbalance;
    j["baselines"] = nlohmann::ordered_json::array();
    for (const auto& b : baselines) {
      nlohmann::ordered_json row;
      row["name"] = b.name;
      row["top1"] = b.top1;
      row["top2"] = b.top2;
      row["top3"] = b.top3;
      row["recall"] = b.recall;
      j["baselines"].push_back(row);
    }
    return j;
  }

  std::string to_table() const {
    char buf[160];
    std::string out;
    out += "model              top-1    top-2    top-3    recall\n";
    auto row = [&](const std::string& name, double t1, double t2, double t3,
                   double rc) {
      snprintf(buf, sizeof buf, "%-16s %8.4f %8.4f %8.4f %8.4f\n",
               name.c_str(), t1, t2, t3, rc);
      out += buf;
    };
    row("classifier", top1, top2, top3, recall);
    for (const auto& b : baselines) row(b.name, b.top1, b.top2, b.top3, b.recall);
    snprintf(buf, sizeof buf,
             "programs: %d scored, %d in recall, %d skipped\n", total_programs,
             evaluated, skipped);
    out += buf;
    snprintf(buf, sizeof buf,
             "labels in slice: %.4f   mean slice ratio: %.4f   label "
             "imbalance: %.4f\n",
             labels_in_slice_fraction, mean_slice_ratio, label_imbalance);
    out += buf;
    return out;
  }
};

}  // namespace nate
