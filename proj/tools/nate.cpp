// Command-line workbench: parse/check/slice/diff on single programs,
// extract/train/blame/eval/gen over corpora.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nate/model_io.hpp"
#include "nate/pipeline.hpp"

using namespace nate;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::set<FeatureGroup> parse_feature_groups(const std::string& spec) {
  std::set<FeatureGroup> groups;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, '+')) {
    if (tok.empty() || tok == "local") continue;
    if (tok == "all")
      return {FeatureGroup::CtxSyn, FeatureGroup::Size, FeatureGroup::Type,
              FeatureGroup::Slice};
    if (tok == "context") groups.insert(FeatureGroup::CtxSyn);
    else if (tok == "type") groups.insert(FeatureGroup::Type);
    else if (tok == "size") groups.insert(FeatureGroup::Size);
    else if (tok == "slice") groups.insert(FeatureGroup::Slice);
    else throw CLI::ValidationError("--features",
                                    "unknown feature group '" + tok + "'");
  }
  return groups;
}

OutlierPolicy parse_threshold(const std::string& spec) {
  if (spec == "sigma") return OutlierPolicy::sigma();
  if (spec.rfind("fixed:", 0) == 0)
    return OutlierPolicy::fixed(std::stod(spec.substr(6)));
  throw CLI::ValidationError("--threshold",
                             "expected fixed:<f> or sigma, got " + spec);
}

ModelChoice parse_model_choice(const std::string& name) {
  if (name == "linear") return ModelChoice::Linear;
  if (name == "tree") return ModelChoice::Tree;
  if (name == "forest") return ModelChoice::Forest;
  if (name == "mlp10") return ModelChoice::Mlp10;
  if (name == "mlp500") return ModelChoice::Mlp500;
  throw CLI::ValidationError(
      "--model", "expected linear|tree|forest|mlp10|mlp500, got " + name);
}

void print_check(const PartialDerivation& d, const Program& p) {
  if (d.well_typed) {
    std::cout << "well-typed: " << show_type(d.root_type()) << "\n";
    return;
  }
  for (const auto& e : d.errors) {
    if (e.kind == TypeError::Kind::Unbound) {
      std::cout << "node " << e.origin << ": unbound variable "
                << p.at(e.origin).name << "\n";
    } else {
      std::cout << "node " << e.origin << ": expected "
                << show_type(e.expected) << ", actual " << show_type(e.actual)
                << "\n";
    }
  }
}

std::string csv_for(const std::vector<Sample>& samples,
                    const FeatureMask& mask) {
  const FeatureSchema& s = schema();
  std::string out = "# schema " + s.version + "\n";
  for (int idx : mask.active) out += s.features[idx].name + ",";
  out += "label,program,node\n";
  for (const auto& sample : samples) {
    for (int idx : mask.active) out += shortest(sample.values[idx]) + ",";
    out += sample.label ? "1," : "0,";
    out += std::to_string(sample.program) + "," + std::to_string(sample.node);
    out += "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"type-error localization workbench"};
  app.require_subcommand(1);

  std::string file, fix_file, corpus_path, model_path, out_path, json_path;
  std::string features = "all";
  std::string threshold = "fixed:0.40";
  std::string model_kind = "tree";
  uint64_t seed = 42;
  int folds = 10, k = 3, count = 100, min_nodes = 10;
  long long budget_ms = 1000;
  TrainConfig train_defaults;
  int epochs = train_defaults.epochs;
  bool no_slice_filter = false, verify = false, balance = false,
       span_overlap = false, no_validate = false, verbose = false,
       no_subsampling = false;

  auto* cmd_parse = app.add_subcommand("parse", "print the AST with node ids");
  cmd_parse->add_option("file", file)->required();

  auto* cmd_check = app.add_subcommand("check", "type-check a program");
  cmd_check->add_option("file", file)->required();

  auto* cmd_slice = app.add_subcommand("slice", "minimal type error slices");
  cmd_slice->add_option("file", file)->required();
  cmd_slice->add_flag("--verify", verify, "re-run the hole oracle");
  cmd_slice->add_option("--budget-ms", budget_ms, "slicing time budget");

  auto* cmd_diff = app.add_subcommand("diff", "blame labels for a pair");
  cmd_diff->add_option("bad", file)->required();
  cmd_diff->add_option("fix", fix_file)->required();

  auto* cmd_extract = app.add_subcommand("extract", "emit feature CSV");
  cmd_extract->add_option("--corpus", corpus_path)->required();
  cmd_extract->add_option("-o,--out", out_path, "output file (default stdout)");
  cmd_extract->add_option("--features", features);
  cmd_extract->add_flag("--no-slice-filter", no_slice_filter);
  cmd_extract->add_flag("--no-validate", no_validate);

  auto* cmd_train = app.add_subcommand("train", "train a classifier");
  cmd_train->add_option("--corpus", corpus_path)->required();
  cmd_train->add_option("--model", model_kind,
                        "linear|tree|forest|mlp10|mlp500");
  cmd_train->add_option("-o,--out", out_path)->required();
  cmd_train->add_option("--features", features);
  cmd_train->add_flag("--no-slice-filter", no_slice_filter);
  cmd_train->add_option("--seed", seed);
  cmd_train->add_option("--threshold", threshold);
  cmd_train->add_option("--train-epochs", epochs, "training epochs");
  cmd_train->add_flag("--no-feature-subsampling", no_subsampling,
                      "grow forest trees on all features at every node");

  auto* cmd_blame = app.add_subcommand("blame", "rank blame candidates");
  cmd_blame->add_option("--model", model_path, "model file")->required();
  cmd_blame->add_option("file", file)->required();
  cmd_blame->add_option("--k", k)->check(CLI::Range(1, 3));
  cmd_blame->add_flag("--no-slice-filter", no_slice_filter);

  auto* cmd_eval = app.add_subcommand("eval", "cross-validated evaluation");
  cmd_eval->add_option("--corpus", corpus_path)->required();
  cmd_eval->add_option("--model", model_kind,
                       "linear|tree|forest|mlp10|mlp500");
  cmd_eval->add_option("--folds", folds);
  cmd_eval->add_option("--seed", seed);
  cmd_eval->add_option("--k", k)->check(CLI::Range(1, 3));
  cmd_eval->add_option("--features", features);
  cmd_eval->add_option("--threshold", threshold);
  cmd_eval->add_flag("--no-slice-filter", no_slice_filter);
  cmd_eval->add_flag("--balance-samples", balance);
  cmd_eval->add_flag("--span-overlap", span_overlap);
  cmd_eval->add_option("--json", json_path, "write the JSON report here");
  cmd_eval->add_option("--train-epochs", epochs, "training epochs");
  cmd_eval->add_flag("-v,--verbose", verbose, "log pipeline stages");
  cmd_eval->add_flag("--no-feature-subsampling", no_subsampling,
                     "grow forest trees on all features at every node");

  auto* cmd_gen = app.add_subcommand("gen", "generate a synthetic corpus");
  cmd_gen->add_option("--count", count);
  cmd_gen->add_option("--seed", seed);
  cmd_gen->add_option("--min-nodes", min_nodes);
  cmd_gen->add_option("-o,--out", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_parse) {
      std::cout << dump_sexp(parse(read_file(file)));
    } else if (*cmd_check) {
      Program p = parse(read_file(file));
      print_check(infer_partial(p), p);
    } else if (*cmd_slice) {
      Program p = parse(read_file(file));
      SliceConfig scfg;
      scfg.budget_ms = budget_ms;
      auto slices = minimal_slices(p, scfg);
      for (const auto& s : slices) {
        std::cout << "error " << s.error_index
                  << (s.minimal ? "" : " (non-minimal: budget exhausted)")
                  << ":";
        for (int id : s.nodes) {
          const Span& sp = p.at(id).span;
          std::cout << " " << id << "@" << sp.lo << ".." << sp.hi;
        }
        std::cout << "\n";
      }
      if (verify) {
        bool suff = verify_sufficiency(p, slices);
        bool mini = verify_minimality(p, slices);
        std::cout << "sufficiency: " << (suff ? "pass" : "fail") << "\n"
                  << "minimality: " << (mini ? "pass" : "fail") << "\n";
        if (!suff || !mini) return 1;
      }
    } else if (*cmd_diff) {
      ProgramPair pair{parse(read_file(file)), parse(read_file(fix_file)), ""};
      BlameLabels labels = tree_diff(pair);
      std::cout << "changed:";
      for (int id : labels.changed) std::cout << " " << id;
      std::cout << "\ndiff_fraction: " << shortest(labels.diff_fraction)
                << "\n";
    } else if (*cmd_extract) {
      auto corpus = corpus_from_jsonl(read_file(corpus_path), !no_validate);
      auto groups = parse_feature_groups(features);
      FeatureMask mask = mask_for_groups(groups);
      std::vector<Sample> all;
      for (size_t i = 0; i < corpus.size(); ++i) {
        auto slices = minimal_slices(corpus[i].bad);
        auto labels = tree_diff(corpus[i]);
        auto samples = extract(corpus[i], slices, labels, !no_slice_filter,
                               static_cast<int>(i));
        all.insert(all.end(), samples.begin(), samples.end());
      }
      std::string csv = csv_for(all, mask);
      if (out_path.empty())
        std::cout << csv;
      else
        write_file(out_path, csv);
    } else if (*cmd_train) {
      auto corpus = corpus_from_jsonl(read_file(corpus_path));
      PipelineConfig cfg;
      cfg.model = parse_model_choice(model_kind);
      cfg.outlier = parse_threshold(threshold);
      cfg.filter_slice = !no_slice_filter;
      cfg.groups = parse_feature_groups(features);
      cfg.seed = seed;
      cfg.train.epochs = epochs;
      cfg.train.feature_subsampling = !no_subsampling;
      auto [kept, discarded] = filter_outliers(corpus, cfg.outlier);
      if (kept.empty()) throw TooFewProgramsError("corpus empty after filter");
      auto prepared = prepare_programs(kept, cfg);
      std::vector<const PreparedProgram*> all;
      for (const auto& p : prepared) all.push_back(&p);
      AnyModel model = train_model(all, cfg);
      save_model_file(model, out_path);
      std::cerr << "trained " << model_choice_name(cfg.model) << " on "
                << kept.size() << " programs (" << discarded.size()
                << " outliers discarded) -> " << out_path << "\n";
    } else if (*cmd_blame) {
      AnyModel model = load_model_file(model_path);
      Program p = parse(read_file(file));
      BlameReport r = blame(model, p, k, !no_slice_filter);
      for (size_t i = 0; i < r.entries.size(); ++i) {
        const BlameEntry& e = r.entries[i];
        std::cout << (i + 1) << ". node " << e.node << " @" << e.span.lo
                  << ".." << e.span.hi << " confidence "
                  << shortest(e.confidence) << "  |  "
                  << p.source.substr(e.span.lo, e.span.hi - e.span.lo)
                  << "\n";
      }
    } else if (*cmd_eval) {
      auto corpus = corpus_from_jsonl(read_file(corpus_path));
      PipelineConfig cfg;
      cfg.model = parse_model_choice(model_kind);
      cfg.outlier = parse_threshold(threshold);
      cfg.filter_slice = !no_slice_filter;
      cfg.groups = parse_feature_groups(features);
      cfg.folds = folds;
      cfg.k = k;
      cfg.seed = seed;
      cfg.balance_samples = balance;
      cfg.span_overlap = span_overlap;
      cfg.train.epochs = epochs;
      cfg.train.feature_subsampling = !no_subsampling;
      cfg.log = verbose;
      PipelineResult result = run_pipeline(corpus, cfg);
      std::cout << result.report.to_table();
      if (!json_path.empty()) {
        nlohmann::ordered_json j;
        j["config"] = {{"model", model_choice_name(cfg.model)},
                       {"folds", cfg.folds},
                       {"seed", cfg.seed},
                       {"features", features},
                       {"slice_filter", cfg.filter_slice}};
        j["kept"] = result.kept;
        j["discarded"] = result.discarded;
        j["mean"] = result.report.to_json();
        j["folds"] = nlohmann::ordered_json::array();
        for (const auto& f : result.folds) j["folds"].push_back(f.to_json());
        write_file(json_path, j.dump(2) + "\n");
      }
    } else if (*cmd_gen) {
      GenSpec spec;
      spec.count = count;
      spec.seed = seed;
      spec.min_nodes = min_nodes;
      std::string jsonl = corpus_to_jsonl(generate_corpus(spec));
      if (out_path.empty())
        std::cout << jsonl;
      else
        write_file(out_path, jsonl);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
