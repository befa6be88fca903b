#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cueload/app.hpp"

namespace cueload {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

namespace detail {

// Expands `--config FILE` (key = value lines, '#' comments, optional
// [section] headers ignored) into flags for every key the command line does
// not already set.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (config_path.empty()) return out;
  std::set<std::string> given;
  for (const auto& a : out) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos
                                                           ? std::string::npos
                                                           : a.find('=') - 2));
  }
  const auto text = read_file(config_path);
  std::size_t line_no = 0;
  for (auto line : lines_of(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(config_path, line_no, "expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    for (auto& c : key) {
      if (c == '_') c = '-';
    }
    if (given.count(key)) continue;
    if (value == "true") {
      out.push_back("--" + key);
    } else if (value != "false") {
      out.push_back("--" + key);
      out.push_back(value);
    }
  }
  return out;
}

inline void add_input_flags(CLI::App* cmd, RunConfig& c, std::string& scope) {
  cmd->add_option("--transcripts", c.transcripts, "CoNLL-U transcripts")->required();
  cmd->add_option("--gaze", c.gaze, "gaze CSV (dialogue_id,time,label)");
  cmd->add_option("--annotations", c.annotations, "annotation CSV")->required();
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "random seed")->envname("CUELOAD_SEED");
  cmd->add_option("--lambda", c.lambda, "syntactic complexity weight");
  cmd->add_option("--ngram-order", c.ngram_order, "word n-gram order");
  cmd->add_option("--gaze-order", c.gaze_order, "gaze n-gram order");
  cmd->add_option("--smoothing-k", c.smoothing_k, "additive smoothing constant");
  cmd->add_option("--text-scope", scope, "explainer or both")
      ->check(CLI::IsMember({"explainer", "both"}));
  cmd->add_option("--logprobs", c.logprobs, "token log-probability JSONL");
  cmd->add_option("--gaze-logprobs", c.gaze_logprobs, "gaze log-probability JSONL");
}

inline void add_classify_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--split-ratio", c.split_ratio, "training share of the holdout split");
  cmd->add_option("--folds", c.folds, "cross-validation folds");
  cmd->add_flag("--paper-parity", c.paper_parity, "fit min-max on all records");
  cmd->add_option("--impute", c.impute, "drop, mean or constant:<v>");
  cmd->add_option("--classifiers", c.classifiers, "forest,boosted,fusion")->delimiter(',');
  cmd->add_option("--embeddings", c.embeddings, "utterance embedding JSONL");
  cmd->add_flag("--with-adl", c.with_adl, "feed dependency length to the classifiers");
  cmd->add_option("--max-text-features", c.max_text_features, "TF-IDF vocabulary cap");
  cmd->add_option("--trees", c.forest.n_trees, "forest size");
  cmd->add_option("--max-depth", c.forest.max_depth, "forest tree depth");
  cmd->add_option("--rounds", c.boosted.n_rounds, "boosting rounds");
  cmd->add_option("--boost-depth", c.boosted.depth, "boosted tree depth");
  cmd->add_option("--boost-lr", c.boosted.learning_rate, "boosting learning rate");
  cmd->add_option("--fusion-lr", c.fusion.learning_rate, "fusion gradient step");
  cmd->add_option("--fusion-epochs", c.fusion.max_epochs, "fusion epoch cap");
  cmd->add_flag("--class-weights", c.fusion.class_weights, "inverse-frequency class weights");
}

}  // namespace detail

// Entry point shared by the executable and the tests. Exit codes: 0 ok,
// 1 usage, 2 data, 3 internal.
inline int run_cli(const std::vector<std::string>& raw_args, std::ostream& out,
                   std::ostream& err) {
  RunConfig c;
  std::string scope = "explainer";
  c.synth.signal = {1.0, 1.0, 1.0, 0.3};
  CLI::App app{"cueload: cognitive-load cue quantification and understanding-state analysis"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--out", c.out, "output directory");
  synth->add_option("--seed", c.seed, "random seed")->envname("CUELOAD_SEED");
  synth->add_option("--dialogues", c.synth.n_dialogues, "number of dialogues");
  synth->add_option("--utterances", c.synth.utterances_per_dialogue, "utterances per dialogue");
  synth->add_option("--vocab", c.synth.vocabulary_size, "vocabulary size");
  synth->add_option("--signal-info", c.synth.signal.info, "information value signal");
  synth->add_option("--signal-gaze", c.synth.signal.gaze, "gaze entropy signal");
  synth->add_option("--signal-syntax", c.synth.signal.syntax, "syntactic complexity signal");
  synth->add_option("--signal-text", c.synth.signal.text, "marker word signal");
  synth->add_option("--gaze-rate", c.synth.gaze_rate_hz, "gaze samples per second");

  auto* quantify = app.add_subcommand("quantify", "compute the cue feature table");
  detail::add_input_flags(quantify, c, scope);
  auto* analyze = app.add_subcommand("analyze", "Kruskal-Wallis and Dunn tests per cue");
  detail::add_input_flags(analyze, c, scope);
  auto* classify = app.add_subcommand("classify", "train and evaluate the classifiers");
  detail::add_input_flags(classify, c, scope);
  detail::add_classify_flags(classify, c);
  auto* report = app.add_subcommand("report", "merge command outputs into report.json");
  report->add_option("--out", c.out, "output directory");
  auto* exp = app.add_subcommand("export-tokens", "write normalized tokens as JSONL");
  exp->add_option("--transcripts", c.transcripts, "CoNLL-U transcripts")->required();
  exp->add_option("--out", c.out, "output directory");

  try {
    auto args = detail::expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  c.text_scope = scope == "both" ? TextScope::Both : TextScope::Explainer;

  try {
    if (synth->parsed()) {
      cmd_synth(c, out);
    } else if (quantify->parsed()) {
      cmd_quantify(c, out, err);
    } else if (analyze->parsed()) {
      cmd_analyze(c, out, err);
    } else if (classify->parsed()) {
      cmd_classify(c, out, err);
    } else if (report->parsed()) {
      cmd_report(c, out, err);
    } else if (exp->parsed()) {
      const auto corpus = parse_conllu(read_file(c.transcripts), c.transcripts);
      write_file(fs::path(c.out) / "tokens.jsonl", export_tokens_jsonl(corpus.utterances));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_data_error() ? kExitData : kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace cueload
