#pragma once

// End-to-end orchestration: outlier filtering, per-program preparation
// (inference, slices, labels, features), fold assignment, training, and
// evaluation.  Everything is a pure function of (corpus, config, seed);
// reports and serialized models are byte-stable across runs.

#include <iostream>
#include <numeric>
#include <set>
#include <vector>

#include "nate/blame.hpp"
#include "nate/corpus.hpp"
#include "nate/metrics.hpp"

namespace nate {

enum class ModelChoice : uint8_t { Linear, Tree, Forest, Mlp10, Mlp500 };

inline const char* model_choice_name(ModelChoice m) {
  switch (m) {
    case ModelChoice::Linear: return "linear";
    case ModelChoice::Tree: return "tree";
    case ModelChoice::Forest: return "forest";
    case ModelChoice::Mlp10: return "mlp10";
    case ModelChoice::Mlp500: return "mlp500";
  }
  return "?";
}

struct PipelineConfig {
  ModelChoice model = ModelChoice::Tree;
  TrainConfig train;
  OutlierPolicy outlier = OutlierPolicy::fixed(0.40);
  bool filter_slice = true;
  std::set<FeatureGroup> groups = {FeatureGroup::CtxSyn, FeatureGroup::Size,
                                   FeatureGroup::Type, FeatureGroup::Slice};
  int folds = 10;
  int k = 3;
  uint64_t seed = 42;
  bool balance_samples = false;  // scale epochs by the slice-filter ratio
  bool span_overlap = false;     // score hits by span overlap, not exact id
  SliceConfig slice;
  bool log = false;
};

struct PreparedProgram {
  int index = 0;
  Program bad;
  std::set<int> changed;
  std::set<int> slice_union;
  std::vector<Sample> samples;  // unfiltered, full schema width
  int first_error_origin = -1;
};

namespace detail {

inline void pipeline_log(const PipelineConfig& cfg, const std::string& msg) {
  if (cfg.log) std::cerr << "[pipeline] " << msg << "\n";
}

}  // namespace detail

inline std::vector<PreparedProgram> prepare_programs(
    const std::vector<ProgramPair>& kept, const PipelineConfig& cfg) {
  std::vector<PreparedProgram> out;
  out.reserve(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) {
    const ProgramPair& pair = kept[i];
    PreparedProgram prog;
    prog.index = static_cast<int>(i);
    prog.bad = pair.bad;
    PartialDerivation deriv = infer_partial(pair.bad);
    if (deriv.well_typed)
      throw TooFewProgramsError("corpus pair " + std::to_string(i) +
                                " is well-typed");
    prog.first_error_origin = deriv.errors.front().origin;
    auto slices = minimal_slices(pair.bad, cfg.slice);
    for (const auto& s : slices)
      prog.slice_union.insert(s.nodes.begin(), s.nodes.end());
    prog.changed = tree_diff(pair).changed;
    prog.samples = extract_program(pair.bad, deriv, slices, prog.changed,
                                   /*filter=*/false, prog.index);
    out.push_back(std::move(prog));
  }
  return out;
}

namespace detail {

inline int slice_column() {
  static const int col = schema().index_of("in-slice");
  return col;
}

// Training rows from a set of prepared programs, honoring the slice filter.
inline std::vector<Sample> training_samples(
    const std::vector<const PreparedProgram*>& programs, bool filter_slice) {
  std::vector<Sample> out;
  for (const PreparedProgram* p : programs)
    for (const auto& s : p->samples) {
      if (filter_slice && s.values[slice_column()] == 0.0) continue;
      out.push_back(s);
    }
  return out;
}

}  // namespace detail

inline AnyModel train_model(const std::vector<const PreparedProgram*>& programs,
                            const PipelineConfig& cfg) {
  FeatureMask mask = mask_for_groups(cfg.groups);
  std::vector<Sample> samples =
      detail::training_samples(programs, cfg.filter_slice);
  if (samples.empty()) throw EmptyDatasetError();
  Dataset data = Dataset::from_samples(samples, mask);

  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  // The size feature is the one unbounded column; standardize it when the
  // mask keeps it.
  int size_idx = schema().index_of("size");
  for (size_t i = 0; i < mask.active.size(); ++i)
    if (mask.active[i] == size_idx)
      tc.standardize_columns = {static_cast<int>(i)};
  if (cfg.balance_samples && cfg.filter_slice) {
    size_t unfiltered = 0;
    for (const PreparedProgram* p : programs) unfiltered += p->samples.size();
    double ratio = static_cast<double>(unfiltered) /
                   std::max<size_t>(1, samples.size());
    int mult = std::max(1, static_cast<int>(ratio + 0.5));
    tc.epochs = std::min(tc.epochs * mult, tc.epochs * 64);
  }

  AnyModel m;
  m.schema_version = schema().version;
  m.mask = mask;
  switch (cfg.model) {
    case ModelChoice::Linear:
      m.kind = ModelKind::Linear;
      m.linear = train_logistic(data, tc);
      break;
    case ModelChoice::Tree:
      m.kind = ModelKind::Tree;
      m.tree = train_tree(data, tc);
      break;
    case ModelChoice::Forest:
      m.kind = ModelKind::Forest;
      m.forest = train_forest(data, tc);
      break;
    case ModelChoice::Mlp10:
      m.kind = ModelKind::Mlp;
      tc.hidden_units = 10;
      m.mlp = train_mlp(data, tc);
      break;
    case ModelChoice::Mlp500:
      m.kind = ModelKind::Mlp;
      tc.hidden_units = 500;
      m.mlp = train_mlp(data, tc);
      break;
  }
  return m;
}

inline EvalReport evaluate_programs(
    const AnyModel& model, const std::vector<const PreparedProgram*>& programs,
    const PipelineConfig& cfg) {
  EvalReport report;
  std::vector<int> ranks, random_ranks, first_ranks;
  RecallAccumulator rec, rec_random, rec_first;
  double labels_total = 0, labels_in_slice = 0;
  double slice_ratio_sum = 0;
  long long samples_total = 0, samples_positive = 0;

  for (const PreparedProgram* p : programs) {
    BlameReport pred = blame_samples(model, p->bad, p->samples,
                                     cfg.filter_slice, 3);
    BlameReport rand_pred = baseline_random_from(
        p->bad, {p->slice_union.begin(), p->slice_union.end()},
        derive_seed(cfg.seed ^ 0xb1a3e0ULL, p->index), 3);
    BlameReport first_pred;
    first_pred.k = 1;
    first_pred.entries.push_back({p->first_error_origin,
                                  p->bad.at(p->first_error_origin).span, 1.0});

    ranks.push_back(hit_rank(pred, p->bad, p->changed, cfg.span_overlap));
    random_ranks.push_back(
        hit_rank(rand_pred, p->bad, p->changed, cfg.span_overlap));
    first_ranks.push_back(
        hit_rank(first_pred, p->bad, p->changed, cfg.span_overlap));

    rec.add(pred, p->changed, p->slice_union);
    rec_random.add(rand_pred, p->changed, p->slice_union);
    rec_first.add(first_pred, p->changed, p->slice_union);

    labels_total += static_cast<double>(p->changed.size());
    for (int c : p->changed) labels_in_slice += p->slice_union.count(c);
    slice_ratio_sum +=
        static_cast<double>(p->slice_union.size()) / p->bad.size();
    for (const auto& s : p->samples) {
      if (cfg.filter_slice && s.values[detail::slice_column()] == 0.0)
        continue;
      ++samples_total;
      samples_positive += s.label ? 1 : 0;
    }
  }

  report.top1 = top_k_accuracy(ranks, 1);
  report.top2 = top_k_accuracy(ranks, 2);
  report.top3 = top_k_accuracy(ranks, 3);
  report.recall = rec.value();
  report.total_programs = static_cast<int>(programs.size());
  report.evaluated = rec.counted;
  report.skipped = rec.skipped;
  report.labels_in_slice_fraction =
      labels_total == 0 ? 0.0 : labels_in_slice / labels_total;
  report.mean_slice_ratio =
      programs.empty() ? 0.0 : slice_ratio_sum / programs.size();
  report.label_imbalance =
      samples_total == 0
          ? 0.0
          : static_cast<double>(samples_positive) / samples_total;
  report.baselines.push_back({"random-from-slice",
                              top_k_accuracy(random_ranks, 1),
                              top_k_accuracy(random_ranks, 2),
                              top_k_accuracy(random_ranks, 3),
                              rec_random.value()});
  report.baselines.push_back({"first-error", top_k_accuracy(first_ranks, 1),
                              top_k_accuracy(first_ranks, 2),
                              top_k_accuracy(first_ranks, 3),
                              rec_first.value()});
  return report;
}

struct PipelineResult {
  EvalReport report;               // mean over folds (or the single split)
  std::vector<EvalReport> folds;
  std::vector<std::string> model_bytes;  // serialized model per fold
  int kept = 0, discarded = 0;
};

namespace detail {

inline EvalReport mean_report(const std::vector<EvalReport>& folds) {
  EvalReport mean;
  if (folds.empty()) return mean;
  size_t nb = folds.front().baselines.size();
  mean.baselines.resize(nb);
  for (size_t b = 0; b < nb; ++b)
    mean.baselines[b].name = folds.front().baselines[b].name;
  for (const auto& f : folds) {
    mean.top1 += f.top1;
    mean.top2 += f.top2;
    mean.top3 += f.top3;
    mean.recall += f.recall;
    mean.total_programs += f.total_programs;
    mean.evaluated += f.evaluated;
    mean.skipped += f.skipped;
    mean.labels_in_slice_fraction += f.labels_in_slice_fraction;
    mean.mean_slice_ratio += f.mean_slice_ratio;
    mean.label_imbalance += f.label_imbalance;
    for (size_t b = 0; b < nb; ++b) {
      mean.baselines[b].top1 += f.baselines[b].top1;
      mean.baselines[b].top2 += f.baselines[b].top2;
      mean.baselines[b].top3 += f.baselines[b].top3;
      mean.baselines[b].recall += f.baselines[b].recall;
    }
  }
  double n = static_cast<double>(folds.size());
  mean.top1 /= n;
  mean.top2 /= n;
  mean.top3 /= n;
  mean.recall /= n;
  mean.labels_in_slice_fraction /= n;
  mean.mean_slice_ratio /= n;
  mean.label_imbalance /= n;
  for (auto& b : mean.baselines) {
    b.top1 /= n;
    b.top2 /= n;
    b.top3 /= n;
    b.recall /= n;
  }
  return mean;
}

}  // namespace detail

// Seeded cross-validation over already prepared programs.
inline PipelineResult cross_validate_prepared(
    const std::vector<PreparedProgram>& prepared, const PipelineConfig& cfg) {
  int n = static_cast<int>(prepared.size());
  if (cfg.folds < 2) throw TooFewProgramsError("folds must be >= 2");
  if (n < cfg.folds)
    throw TooFewProgramsError(std::to_string(n) + " programs for " +
                              std::to_string(cfg.folds) + " folds");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  RngEngine rng(derive_seed(cfg.seed, 0xf01d5ULL));
  rng_shuffle(order, rng);

  PipelineResult result;
  int base = n / cfg.folds, extra = n % cfg.folds;
  int at = 0;
  for (int f = 0; f < cfg.folds; ++f) {
    int size = base + (f < extra ? 1 : 0);
    std::set<int> test_idx(order.begin() + at, order.begin() + at + size);
    at += size;
    std::vector<const PreparedProgram*> train_set, test_set;
    for (int i = 0; i < n; ++i)
      (test_idx.count(i) ? test_set : train_set).push_back(&prepared[i]);
    AnyModel model = train_model(train_set, cfg);
    detail::pipeline_log(cfg, "fold " + std::to_string(f) + ": trained on " +
                                  std::to_string(train_set.size()) +
                                  ", testing " +
                                  std::to_string(test_set.size()));
    result.folds.push_back(evaluate_programs(model, test_set, cfg));
    result.model_bytes.push_back(save_model(model));
  }
  result.report = detail::mean_report(result.folds);
  return result;
}

// Full pipeline: outlier filter -> slices -> labels -> extraction ->
// training -> evaluation.  folds >= 2 cross-validates; folds == 1 trains
// and evaluates on the same data (resubstitution).
inline PipelineResult run_pipeline(const std::vector<ProgramPair>& corpus,
                                   const PipelineConfig& cfg) {
  auto [kept, discarded] = filter_outliers(corpus, cfg.outlier);
  detail::pipeline_log(cfg, "outlier filter kept " +
                                std::to_string(kept.size()) + ", discarded " +
                                std::to_string(discarded.size()));
  if (kept.empty()) throw TooFewProgramsError("corpus is empty after filtering");
  if (cfg.folds > 1 && static_cast<int>(kept.size()) < cfg.folds)
    throw TooFewProgramsError("not enough programs for requested folds");

  std::vector<PreparedProgram> prepared = prepare_programs(kept, cfg);
  detail::pipeline_log(cfg, "prepared " + std::to_string(prepared.size()) +
                                " programs");

  PipelineResult result;
  if (cfg.folds >= 2) {
    result = cross_validate_prepared(prepared, cfg);
  } else {
    std::vector<const PreparedProgram*> all;
    for (const auto& p : prepared) all.push_back(&p);
    AnyModel model = train_model(all, cfg);
    EvalReport report = evaluate_programs(model, all, cfg);
    result.folds.push_back(report);
    result.report = report;
    result.model_bytes.push_back(save_model(model));
  }
  result.kept = static_cast<int>(kept.size());
  result.discarded = static_cast<int>(discarded.size());
  return result;
}

}  // namespace nate
