#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cueload/classify.hpp"
#include "cueload/corpus.hpp"
#include "cueload/features.hpp"
#include "cueload/format.hpp"
#include "cueload/lm.hpp"
#include "cueload/ngram.hpp"
#include "cueload/stats.hpp"
#include "cueload/synth.hpp"

namespace cueload {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct RunConfig {
  std::string transcripts;
  std::string gaze;
  std::string annotations;
  std::string out = "out";
  std::uint64_t seed = 42;
  double lambda = 0.5;
  int ngram_order = 2;
  int gaze_order = 3;
  double smoothing_k = 0.1;
  double split_ratio = 0.7;
  int folds = 10;
  TextScope text_scope = TextScope::Explainer;
  bool paper_parity = false;
  std::string impute = "mean";
  std::vector<std::string> classifiers = {"forest", "boosted", "fusion"};
  bool with_adl = false;
  std::string logprobs;
  std::string gaze_logprobs;
  std::string embeddings;
  std::size_t max_text_features = 1000;
  ForestConfig forest;
  BoostedConfig boosted;
  FusionConfig fusion;
  GeneratorConfig synth;

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("--lambda must lie in [0, 1]");
    if (ngram_order < 1 || ngram_order > 5) throw UsageError("--ngram-order must lie in [1, 5]");
    if (gaze_order < 1 || gaze_order > 5) throw UsageError("--gaze-order must lie in [1, 5]");
    if (!(smoothing_k > 0.0)) throw UsageError("--smoothing-k must be > 0");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
      throw UsageError("--split-ratio must lie strictly between 0 and 1");
    }
    if (folds < 2) throw UsageError("--folds must be >= 2");
    parse_impute_policy(impute);
    for (const auto& c : classifiers) {
      if (!parse_classifier(c)) throw UsageError("unknown classifier '" + c + "'");
    }
  }

  // Inputs are recorded by file name only, so artifacts do not depend on
  // where the run happened.
  ojson to_json() const {
    auto name = [](const std::string& p) {
      return p.empty() ? ojson(nullptr) : ojson(fs::path(p).filename().string());
    };
    ojson cls = ojson::array();
    for (const auto& c : classifiers) cls.push_back(c);
    return ojson{
        {"transcripts", name(transcripts)},
        {"gaze", name(gaze)},
        {"annotations", name(annotations)},
        {"logprobs", name(logprobs)},
        {"gaze_logprobs", name(gaze_logprobs)},
        {"embeddings", name(embeddings)},
        {"seed", seed},
        {"lambda", lambda},
        {"ngram_order", ngram_order},
        {"gaze_order", gaze_order},
        {"smoothing_k", smoothing_k},
        {"split_ratio", split_ratio},
        {"folds", folds},
        {"text_scope", text_scope == TextScope::Explainer ? "explainer" : "both"},
        {"paper_parity", paper_parity},
        {"impute", impute},
        {"classifiers", cls},
        {"with_adl", with_adl},
        {"max_text_features", max_text_features},
        {"forest",
         {{"n_trees", forest.n_trees}, {"max_depth", forest.max_depth}, {"min_leaf", forest.min_leaf}}},
        {"boosted",
         {{"n_rounds", boosted.n_rounds},
          {"depth", boosted.depth},
          {"learning_rate", boosted.learning_rate},
          {"subsample", boosted.subsample}}},
        {"fusion",
         {{"learning_rate", fusion.learning_rate},
          {"max_epochs", fusion.max_epochs},
          {"tolerance", fusion.tolerance},
          {"l2", fusion.l2},
          {"class_weights", fusion.class_weights}}},
    };
  }
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// Parsed inputs and everything derived before classification.
struct Workspace {
  RunConfig config;
  ConlluResult corpus;
  GazeStreams gaze;
  bool has_gaze = false;
  std::vector<UnderstandingAnnotation> annotations;
  std::optional<std::map<RecordKey, TokenLogProbRecord>> logprobs;
  std::optional<std::map<RecordKey, GazeLogProbRecord>> gaze_logprobs;
  std::optional<std::map<RecordKey, std::vector<double>>> embeddings;
  ojson input_hashes = ojson::object();
  std::vector<ContextWindow> windows;
  std::vector<FeatureRecord> records;
  std::vector<std::string> warnings;
};

// Loads inputs, builds windows and quantifies every window. Missing gaze
// input is tolerated: the gaze cue is then missing everywhere.
inline std::unique_ptr<Workspace> prepare(const RunConfig& config) {
  config.validate();
  auto ws = std::make_unique<Workspace>();
  ws->config = config;
  if (config.transcripts.empty()) throw UsageError("--transcripts is required");
  if (config.annotations.empty()) throw UsageError("--annotations is required");
  auto load = [&](const std::string& path) {
    auto bytes = read_file(path);
    ws->input_hashes[fs::path(path).filename().string()] = content_hash(bytes);
    return bytes;
  };
  ws->corpus = parse_conllu(load(config.transcripts), config.transcripts);
  if (ws->corpus.skipped_lines) {
    ws->warnings.push_back("skipped " + std::to_string(ws->corpus.skipped_lines) +
                           " multi-word token / empty node lines");
  }
  ws->annotations = parse_annotations(load(config.annotations), config.annotations);
  if (!config.gaze.empty() && fs::exists(config.gaze)) {
    ws->gaze = parse_gaze(load(config.gaze), config.gaze);
    ws->has_gaze = true;
  } else {
    ws->warnings.push_back(config.gaze.empty() ? "no gaze input; gaze_entropy missing"
                                               : "gaze file " + config.gaze +
                                                     " not found; gaze_entropy missing");
  }
  if (!config.logprobs.empty()) {
    ws->logprobs = import_logprobs(load(config.logprobs), config.logprobs);
    check_alignment(*ws->logprobs, ws->corpus.utterances);
  }
  if (!config.gaze_logprobs.empty()) {
    ws->gaze_logprobs = import_gaze_logprobs(load(config.gaze_logprobs), config.gaze_logprobs);
  }
  if (!config.embeddings.empty()) {
    ws->embeddings = import_embeddings(load(config.embeddings), config.embeddings);
  }

  ws->windows = build_context_windows(ws->corpus.utterances, ws->annotations, ws->gaze);

  std::vector<std::vector<std::string>> sentences;
  for (const auto& u : ws->corpus.utterances) sentences.push_back(normalized_tokens(u));
  const auto word_model = train_word_ngram(sentences, config.ngram_order, config.smoothing_k);
  std::optional<GazeModel> gaze_model;
  if (ws->has_gaze && !ws->gaze.empty()) {
    std::vector<std::vector<int>> streams;
    for (const auto& [d, samples] : ws->gaze) {
      std::vector<int> labels;
      for (const auto& s : samples) labels.push_back(s.label);
      streams.push_back(std::move(labels));
    }
    gaze_model = train_gaze_ngram(streams, config.gaze_order, config.smoothing_k);
  }
  ScoringResources res;
  res.word_model = &word_model;
  res.word_logprobs = ws->logprobs ? &*ws->logprobs : nullptr;
  res.gaze_model = gaze_model ? &*gaze_model : nullptr;
  res.gaze_logprobs = ws->gaze_logprobs ? &*ws->gaze_logprobs : nullptr;
  QuantifyOptions opt{config.lambda, config.text_scope};
  for (const auto& w : ws->windows) ws->records.push_back(quantify(w, res, opt, &ws->warnings));
  minmax_normalize(ws->records, &ws->warnings);
  return ws;
}

inline ojson provenance(const Workspace& ws, std::string_view command) {
  return ojson{{"command", command},
               {"tool", "cueload"},
               {"format_version", 1},
               {"config", ws.config.to_json()},
               {"input_hashes", ws.input_hashes}};
}

inline ojson quantify_summary(const Workspace& ws) {
  ojson counts;
  const auto sc = state_counts(ws.annotations);
  for (State s : kAllStates) counts[std::string(state_code(s))] = sc[static_cast<std::size_t>(s)];
  ojson missing;
  for (Cue c : kAllCues) {
    std::size_t m = 0;
    for (const auto& r : ws.records) m += r.missing(c) ? 1 : 0;
    missing[std::string(cue_name(c))] =
        ws.records.empty() ? 0.0 : static_cast<double>(m) / static_cast<double>(ws.records.size());
  }
  return ojson{{"utterances", ws.corpus.utterances.size()},
               {"windows", ws.windows.size()},
               {"state_counts", counts},
               {"missing_rate", missing},
               {"warnings", ws.warnings.size()}};
}

inline void print_warnings(const Workspace& ws, std::ostream& err) {
  for (const auto& w : ws.warnings) err << "warning: " << w << "\n";
}

inline void cmd_quantify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto ws = prepare(config);
  print_warnings(*ws, err);
  const fs::path dir(config.out);
  write_file(dir / "features.csv", features_to_csv(ws->records));
  write_file(dir / "features.jsonl", features_to_jsonl(ws->records));
  auto doc = provenance(*ws, "quantify");
  doc["artifacts"] = {"features.csv", "features.jsonl"};
  doc["summary"] = quantify_summary(*ws);
  write_file(dir / "quantify.json", doc.dump(2) + "\n");
  out << "windows: " << ws->windows.size() << "\n";
  for (const auto& [k, v] : doc["summary"]["state_counts"].items()) {
    out << "  " << k << ": " << v.get<std::size_t>() << "\n";
  }
  for (const auto& [k, v] : doc["summary"]["missing_rate"].items()) {
    out << "missing " << k << ": " << format_double(v.get<double>()) << "\n";
  }
}

struct CueAnalysis {
  Cue cue;
  std::optional<KruskalResult> kruskal;
  std::vector<DunnResult> dunn;
  std::string error;
};

inline std::vector<CueAnalysis> analyze_records(std::span<const FeatureRecord> records) {
  std::vector<CueAnalysis> out;
  for (Cue c : kAllCues) {
    CueAnalysis a{c, std::nullopt, {}, {}};
    const auto groups = cue_groups(records, c);
    try {
      a.kruskal = kruskal_wallis(groups, std::string(cue_name(c)));
      a.dunn = dunn_posthoc(groups, std::string(cue_name(c)));
    } catch (const DegenerateDataError& e) {
      a.error = e.what();
    }
    out.push_back(std::move(a));
  }
  return out;
}

inline std::string pair_name(std::size_t a, std::size_t b) {
  return std::string(state_code(kAllStates[a])) + "-" + std::string(state_code(kAllStates[b]));
}

inline void cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto ws = prepare(config);
  print_warnings(*ws, err);
  const auto analyses = analyze_records(ws->records);
  std::string kw_csv = "cue,H,p,eta2\n";
  std::string dunn_csv = "cue,pair,z,p_raw,p_adj\n";
  ojson results = ojson::array();
  for (const auto& a : analyses) {
    const std::string name(cue_name(a.cue));
    ojson entry{{"cue", name}};
    if (!a.kruskal) {
      entry["error"] = a.error;
      err << "warning: cue " << name << ": " << a.error << "\n";
      results.push_back(entry);
      continue;
    }
    const auto& k = *a.kruskal;
    kw_csv += name + "," + format_double(k.h) + "," + format_double(k.p) + "," +
              format_double(k.eta_squared) + "\n";
    entry["H"] = k.h;
    entry["p"] = k.p;
    entry["eta2"] = k.eta_squared;
    entry["df"] = k.df;
    entry["group_sizes"] = k.group_sizes;
    ojson pairs = ojson::array();
    for (const auto& d : a.dunn) {
      const auto pn = pair_name(d.group_a, d.group_b);
      dunn_csv += name + "," + pn + "," + format_double(d.z) + "," + format_double(d.p_raw) + "," +
                  format_double(d.p_adj) + "\n";
      pairs.push_back({{"pair", pn},
                       {"z", d.z},
                       {"p_raw", d.p_raw},
                       {"p_adj", d.p_adj},
                       {"significant", d.p_adj < 0.05}});
    }
    entry["dunn"] = pairs;
    results.push_back(entry);
    out << name << ": H=" << format_double(k.h) << " p=" << format_double(k.p)
        << " eta2=" << format_double(k.eta_squared) << "\n";
    for (const auto& d : a.dunn) {
      if (d.p_adj < 0.05) {
        out << "  significant " << pair_name(d.group_a, d.group_b)
            << " p_adj=" << format_double(d.p_adj) << "\n";
      }
    }
  }

  // Box data is drawn from the normalized values.
  std::string box_csv =
      "cue,state,n,min,q1,median,q3,max,whisker_low,whisker_high,outliers\n";
  for (Cue c : kAllCues) {
    const auto groups = cue_groups(ws->records, c, true);
    for (State s : kAllStates) {
      const auto& g = groups[static_cast<std::size_t>(s)];
      if (g.empty()) continue;
      const auto b = box_summary(g);
      std::string outliers;
      for (std::size_t i = 0; i < b.outliers.size(); ++i) {
        if (i) outliers += ";";
        outliers += format_double(b.outliers[i]);
      }
      box_csv += std::string(cue_name(c)) + "," + std::string(state_code(s)) + "," +
                 std::to_string(b.n) + "," + format_double(b.min) + "," + format_double(b.q1) +
                 "," + format_double(b.median) + "," + format_double(b.q3) + "," +
                 format_double(b.max) + "," + format_double(b.whisker_low) + "," +
                 format_double(b.whisker_high) + "," + outliers + "\n";
    }
  }
  const fs::path dir(config.out);
  write_file(dir / "kruskal.csv", kw_csv);
  write_file(dir / "dunn.csv", dunn_csv);
  write_file(dir / "boxplot.csv", box_csv);
  auto doc = provenance(*ws, "analyze");
  doc["artifacts"] = {"kruskal.csv", "dunn.csv", "boxplot.csv"};
  doc["alpha"] = 0.05;
  doc["results"] = results;
  write_file(dir / "analyze.json", doc.dump(2) + "\n");
}

inline ClassifySuiteConfig suite_config(const RunConfig& config) {
  ClassifySuiteConfig s;
  s.forest = config.forest;
  s.boosted = config.boosted;
  s.fusion = config.fusion;
  s.max_text_features = config.max_text_features;
  if (config.with_adl) s.cues.push_back(Cue::DependencyLength);
  s.paper_parity = config.paper_parity;
  s.impute = parse_impute_policy(config.impute);
  s.seed = config.seed;
  return s;
}

inline ojson report_json(const EvaluationReport& r) {
  ojson per = ojson::object();
  for (State s : kAllStates) {
    const auto& m = r.per_class[static_cast<std::size_t>(s)];
    per[std::string(state_code(s))] = {{"precision", m.precision},
                                       {"recall", m.recall},
                                       {"f1", m.f1},
                                       {"support", m.support},
                                       {"precision_defined", m.precision_defined},
                                       {"recall_defined", m.recall_defined}};
  }
  return ojson{{"per_class", per},
               {"macro_f1", r.macro_f1},
               {"accuracy", r.accuracy},
               {"total", r.total},
               {"confusion", r.confusion}};
}

inline std::string confusion_csv(const ConfusionMatrix& m) {
  std::string out = "gold\\pred";
  for (State s : kAllStates) out += "," + std::string(state_code(s));
  out += "\n";
  for (State g : kAllStates) {
    out += std::string(state_code(g));
    for (State p : kAllStates) {
      out += "," + std::to_string(m[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)]);
    }
    out += "\n";
  }
  return out;
}

inline std::vector<ClassifierRun> run_suite(const Workspace& ws, std::vector<FeatureRecord>& kept,
                                            std::vector<std::vector<double>>& emb) {
  const auto& config = ws.config;
  const auto suite = suite_config(config);
  kept.clear();
  emb.clear();
  std::size_t dim = 0;
  if (ws.embeddings && !ws.embeddings->empty()) dim = ws.embeddings->begin()->second.size();
  for (std::size_t i = 0; i < ws.records.size(); ++i) {
    const auto& r = ws.records[i];
    if (std::holds_alternative<ImputeDrop>(suite.impute)) {
      bool any_missing = false;
      for (Cue c : suite.cues) any_missing = any_missing || r.missing(c);
      if (any_missing) continue;
    }
    kept.push_back(r);
    if (dim) emb.push_back(window_embedding(ws.windows[i], *ws.embeddings, dim));
  }
  ClassifyDataset data{kept, emb};
  std::vector<ClassifierRun> runs;
  for (const auto& name : config.classifiers) {
    const auto kind = *parse_classifier(name);
    for (auto setting : {FeatureSetting::TextOnly, FeatureSetting::TextAndCues}) {
      runs.push_back(run_classifier(data, kind, setting, suite, config.split_ratio,
                                    static_cast<std::size_t>(config.folds)));
    }
  }
  return runs;
}

inline void cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto ws = prepare(config);
  print_warnings(*ws, err);
  std::vector<FeatureRecord> kept;
  std::vector<std::vector<double>> emb;
  const auto runs = run_suite(*ws, kept, emb);

  const fs::path dir(config.out);
  std::string table = "classifier,features,state,precision,recall,f1,support\n";
  std::string summary =
      "classifier,features,accuracy,macro_f1,cv_accuracy_mean,cv_accuracy_sd,"
      "cv_macro_f1_mean,cv_macro_f1_sd\n";
  ojson runs_json = ojson::array();
  ojson artifacts = {"classification.csv", "classification_summary.csv"};
  for (const auto& run : runs) {
    const std::string cls(classifier_name(run.kind));
    const std::string set(setting_name(run.setting));
    for (State s : kAllStates) {
      const auto& m = run.holdout.per_class[static_cast<std::size_t>(s)];
      table += cls + "," + set + "," + std::string(state_code(s)) + "," +
               format_double(m.precision) + "," + format_double(m.recall) + "," +
               format_double(m.f1) + "," + std::to_string(m.support) + "\n";
    }
    summary += cls + "," + set + "," + format_double(run.holdout.accuracy) + "," +
               format_double(run.holdout.macro_f1) + "," + format_double(run.cv.accuracy.mean) +
               "," + format_double(run.cv.accuracy.sd) + "," +
               format_double(run.cv.macro_f1.mean) + "," + format_double(run.cv.macro_f1.sd) +
               "\n";
    std::string setting_file = run.setting == FeatureSetting::TextOnly ? "text" : "text_cues";
    const std::string cm_name = "confusion_" + cls + "_" + setting_file + ".csv";
    write_file(dir / cm_name, confusion_csv(run.holdout.confusion));
    artifacts.push_back(cm_name);
    runs_json.push_back({{"classifier", cls},
                         {"features", set},
                         {"holdout", report_json(run.holdout)},
                         {"cv",
                          {{"folds", run.cv.fold_accuracy.size()},
                           {"fold_accuracy", run.cv.fold_accuracy},
                           {"fold_macro_f1", run.cv.fold_macro_f1},
                           {"accuracy_mean", run.cv.accuracy.mean},
                           {"accuracy_sd", run.cv.accuracy.sd},
                           {"macro_f1_mean", run.cv.macro_f1.mean},
                           {"macro_f1_sd", run.cv.macro_f1.sd},
                           {"pooled_confusion", run.cv.pooled_confusion}}}});
    out << cls << " [" << set << "] accuracy=" << format_double(run.holdout.accuracy)
        << " macro_f1=" << format_double(run.holdout.macro_f1)
        << " cv_accuracy=" << format_double(run.cv.accuracy.mean) << "+-"
        << format_double(run.cv.accuracy.sd) << "\n";
  }
  write_file(dir / "classification.csv", table);
  write_file(dir / "classification_summary.csv", summary);
  auto doc = provenance(*ws, "classify");
  doc["artifacts"] = artifacts;
  doc["records_used"] = kept.size();
  doc["chance_baseline"] = 0.25;
  doc["runs"] = runs_json;
  write_file(dir / "classify.json", doc.dump(2) + "\n");
}

// Merges the JSON documents written by earlier commands in the output
// directory into report.json.
inline void cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const fs::path dir(config.out);
  ojson report{{"tool", "cueload"}, {"format_version", 1}};
  std::size_t found = 0;
  for (const char* part : {"quantify", "analyze", "classify"}) {
    const auto path = dir / (std::string(part) + ".json");
    if (!fs::exists(path)) {
      err << "warning: " << path.string() << " not found\n";
      continue;
    }
    try {
      report[part] = ojson::parse(read_file(path.string()));
    } catch (const ojson::parse_error& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
    ++found;
  }
  if (!found) throw ValidationError("no command outputs found in " + dir.string());
  write_file(dir / "report.json", report.dump(2) + "\n");
  out << "merged " << found << " result documents into " << (dir / "report.json").string()
      << "\n";
}

inline void cmd_synth(const RunConfig& config, std::ostream& out) {
  auto gen = config.synth;
  gen.seed = config.seed;
  const auto corpus = generate_corpus(gen);
  const fs::path dir(config.out);
  write_file(dir / "transcripts.conllu", corpus.conllu);
  write_file(dir / "gaze.csv", corpus.gaze_csv);
  write_file(dir / "annotations.csv", corpus.annotations_csv);
  out << "wrote synthetic corpus to " << dir.string() << "\n";
}

}  // namespace cueload
