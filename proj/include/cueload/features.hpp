#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cueload/corpus.hpp"
#include "cueload/format.hpp"
#include "cueload/lm.hpp"
#include "cueload/syntax.hpp"
#include "cueload/text.hpp"

namespace cueload {

enum class Cue { InfoValue = 0, GazeEntropy = 1, Syntax = 2, DependencyLength = 3 };
inline constexpr std::size_t kNumCues = 4;
inline constexpr std::array<Cue, kNumCues> kAllCues = {Cue::InfoValue, Cue::GazeEntropy,
                                                       Cue::Syntax, Cue::DependencyLength};

inline std::string_view cue_name(Cue c) {
  static constexpr std::array<std::string_view, kNumCues> names = {"info_value",
                                                                   "gaze_entropy", "sc", "adl"};
  return names[static_cast<std::size_t>(c)];
}

enum class TextScope { Explainer, Both };

struct FeatureRecord {
  std::string window_id;
  std::string dialogue_id;
  State label = State::Understanding;
  std::array<std::optional<double>, kNumCues> raw{};
  std::array<std::optional<double>, kNumCues> normalized{};
  // Normalized window tokens joined by spaces; input to the text features.
  std::string text;

  bool missing(Cue c) const { return !raw[static_cast<std::size_t>(c)].has_value(); }
  std::optional<double> value(Cue c) const { return raw[static_cast<std::size_t>(c)]; }
  std::optional<double> norm(Cue c) const { return normalized[static_cast<std::size_t>(c)]; }

  // One character per cue in column order, '1' where the raw cue is undefined.
  std::string missing_mask() const {
    std::string mask;
    for (Cue c : kAllCues) mask.push_back(missing(c) ? '1' : '0');
    return mask;
  }
};

// Language scoring resources. Imported records take precedence over the
// built-in models; either may be absent.
struct ScoringResources {
  const WordModel* word_model = nullptr;
  const std::map<RecordKey, TokenLogProbRecord>* word_logprobs = nullptr;
  const GazeModel* gaze_model = nullptr;
  const std::map<RecordKey, GazeLogProbRecord>* gaze_logprobs = nullptr;
};

struct QuantifyOptions {
  double lambda = 0.5;
  TextScope text_scope = TextScope::Explainer;
};

inline std::vector<const Utterance*> text_utterances(const ContextWindow& w, TextScope scope) {
  std::vector<const Utterance*> out;
  for (const Utterance* u : w.utterances()) {
    if (scope == TextScope::Both || u->speaker == Speaker::Explainer) out.push_back(u);
  }
  return out;
}

// The four cue values of one window. Undefined cues are left empty and a
// warning is appended; nothing here throws on degenerate data.
inline FeatureRecord quantify(const ContextWindow& w, const ScoringResources& res,
                              const QuantifyOptions& opt, std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back("window " + w.id + ": " + msg);
  };
  FeatureRecord r;
  r.window_id = w.id;
  r.dialogue_id = w.annotation.dialogue_id;
  r.label = w.annotation.state;

  // Classifier text always spans the whole window; the scope only limits the cues.
  for (const Utterance* u : w.utterances()) {
    for (const auto& t : normalized_tokens(*u)) {
      if (!r.text.empty()) r.text += ' ';
      r.text += t;
    }
  }

  const auto utts = text_utterances(w, opt.text_scope);
  std::vector<double> lps;
  bool scorable = true;
  for (const Utterance* u : utts) {
    const auto tokens = normalized_tokens(*u);
    if (tokens.empty()) continue;
    const TokenLogProbRecord* rec = nullptr;
    if (res.word_logprobs) {
      if (auto it = res.word_logprobs->find({u->dialogue_id, u->id});
          it != res.word_logprobs->end()) {
        rec = &it->second;
      }
    }
    if (rec) {
      lps.insert(lps.end(), rec->logprobs.begin(), rec->logprobs.end());
    } else if (res.word_model) {
      const auto part = res.word_model->token_logprobs(tokens);
      lps.insert(lps.end(), part.begin(), part.end());
    } else {
      scorable = false;
    }
  }
  if (!scorable) {
    warn("no word scores available; info_value missing");
  } else if (lps.empty()) {
    warn("no tokens in text scope; info_value missing");
  } else {
    r.raw[0] = mean_surprisal(lps);
  }

  std::vector<int> labels;
  labels.reserve(w.gaze.size());
  for (const auto& g : w.gaze) labels.push_back(g.label);
  const GazeLogProbRecord* grec = nullptr;
  if (res.gaze_logprobs) {
    if (auto it = res.gaze_logprobs->find({w.annotation.dialogue_id, w.annotation.utterance_id});
        it != res.gaze_logprobs->end()) {
      grec = &it->second;
    }
  }
  if (labels.empty()) {
    warn("no gaze samples in window; gaze_entropy missing");
  } else if (grec) {
    if (grec->labels != labels) {
      throw AlignmentError("gaze logprob record for " + w.id +
                           " does not match the window's aligned labels");
    }
    r.raw[1] = mean_surprisal(grec->logprobs);
  } else if (res.gaze_model) {
    r.raw[1] = gaze_entropy(labels, *res.gaze_model);
  } else {
    warn("no gaze scores available; gaze_entropy missing");
  }

  try {
    auto syn = window_syntax_metrics(utts, opt.lambda);
    for (const auto& m : syn.warnings) warn(m);
    r.raw[2] = syn.sc;
    if (syn.adl) {
      r.raw[3] = *syn.adl;
    } else {
      warn("no dependency arcs; adl missing");
    }
  } catch (const MissingTreeError&) {
    warn("no parsed utterance in text scope; sc and adl missing");
  }
  return r;
}

// Per-cue [min, max] fitted on a subset of records.
struct MinMaxScaler {
  std::array<std::optional<std::pair<double, double>>, kNumCues> ranges{};

  static MinMaxScaler fit(std::span<const FeatureRecord> records,
                          std::span<const std::size_t> rows,
                          std::vector<std::string>* warnings = nullptr) {
    MinMaxScaler s;
    for (std::size_t c = 0; c < kNumCues; ++c) {
      for (std::size_t row : rows) {
        const auto& v = records[row].raw[c];
        if (!v) continue;
        auto& r = s.ranges[c];
        if (!r) {
          r = std::pair{*v, *v};
        } else {
          r->first = std::min(r->first, *v);
          r->second = std::max(r->second, *v);
        }
      }
      if (!s.ranges[c] && warnings) {
        warnings->push_back("cue " + std::string(cue_name(kAllCues[c])) +
                            " has no defined values; normalization skipped");
      }
    }
    return s;
  }

  static MinMaxScaler fit(std::span<const FeatureRecord> records,
                          std::vector<std::string>* warnings = nullptr) {
    std::vector<std::size_t> rows(records.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return fit(records, rows, warnings);
  }

  // (x - min) / (max - min), clamped to [0, 1]; a constant cue maps to 0.
  std::optional<double> transform(Cue cue, std::optional<double> x) const {
    const auto& r = ranges[static_cast<std::size_t>(cue)];
    if (!x || !r) return std::nullopt;
    const double span = r->second - r->first;
    if (span <= 0.0) return 0.0;
    return std::clamp((*x - r->first) / span, 0.0, 1.0);
  }

  void apply(std::span<FeatureRecord> records) const {
    for (auto& rec : records) {
      for (Cue c : kAllCues) {
        rec.normalized[static_cast<std::size_t>(c)] = transform(c, rec.value(c));
      }
    }
  }
};

// Fits on all records and writes the normalized fields in place.
inline MinMaxScaler minmax_normalize(std::span<FeatureRecord> records,
                                     std::vector<std::string>* warnings = nullptr) {
  auto scaler = MinMaxScaler::fit(records, warnings);
  scaler.apply(records);
  return scaler;
}

struct ImputeDrop {};
struct ImputeMean {};
struct ImputeConstant {
  double value = 0.0;
};
using ImputePolicy = std::variant<ImputeDrop, ImputeMean, ImputeConstant>;

inline ImputePolicy parse_impute_policy(std::string_view text) {
  if (text == "drop") return ImputeDrop{};
  if (text == "mean") return ImputeMean{};
  if (text.starts_with("constant:") || text.starts_with("constant=")) {
    if (auto v = parse_double(text.substr(9))) return ImputeConstant{*v};
  }
  throw UsageError("impute policy must be drop, mean or constant:<value>");
}

inline std::string impute_policy_name(const ImputePolicy& p) {
  if (std::holds_alternative<ImputeDrop>(p)) return "drop";
  if (std::holds_alternative<ImputeMean>(p)) return "mean";
  return "constant:" + format_double(std::get<ImputeConstant>(p).value);
}

// Fill values per cue for the mean/constant policies, fitted on `rows`.
inline std::array<double, kNumCues> impute_fill_values(std::span<const FeatureRecord> records,
                                                       std::span<const std::size_t> rows,
                                                       const ImputePolicy& policy) {
  std::array<double, kNumCues> fill{};
  if (auto* c = std::get_if<ImputeConstant>(&policy)) {
    fill.fill(c->value);
    return fill;
  }
  for (std::size_t c = 0; c < kNumCues; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t row : rows) {
      if (const auto& v = records[row].normalized[c]) {
        sum += *v;
        ++n;
      }
    }
    fill[c] = n ? sum / static_cast<double>(n) : 0.0;
  }
  return fill;
}

// Applies `policy` to the normalized values of `cues`. Under drop, records
// with any of those cues missing are removed; otherwise missing normalized
// values are filled and the record count is preserved. Raw values and the
// missing mask are untouched.
inline std::vector<FeatureRecord> impute_missing(std::vector<FeatureRecord> records,
                                                 const ImputePolicy& policy,
                                                 std::span<const Cue> cues = kAllCues) {
  if (std::holds_alternative<ImputeDrop>(policy)) {
    std::erase_if(records, [&](const FeatureRecord& r) {
      for (Cue c : cues) {
        if (!r.norm(c)) return true;
      }
      return false;
    });
    return records;
  }
  std::vector<std::size_t> rows(records.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  const auto fill = impute_fill_values(records, rows, policy);
  for (auto& r : records) {
    for (Cue c : cues) {
      auto& v = r.normalized[static_cast<std::size_t>(c)];
      if (!v) v = fill[static_cast<std::size_t>(c)];
    }
  }
  return records;
}

// Values of one cue grouped by state, skipping records where it is missing.
inline std::array<std::vector<double>, kNumStates> cue_groups(
    std::span<const FeatureRecord> records, Cue cue, bool normalized = false) {
  std::array<std::vector<double>, kNumStates> groups;
  for (const auto& r : records) {
    const auto v = normalized ? r.norm(cue) : r.value(cue);
    if (v) groups[static_cast<std::size_t>(r.label)].push_back(*v);
  }
  return groups;
}

inline constexpr std::string_view kFeatureCsvHeader =
    "window_id,dialogue_id,label,info_value,gaze_entropy,sc,adl,info_value_n,"
    "gaze_entropy_n,sc_n,adl_n,missing_mask";

inline std::string features_to_csv(std::span<const FeatureRecord> records) {
  std::string out(kFeatureCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.window_id + "," + r.dialogue_id + "," + std::string(state_code(r.label));
    for (const auto& v : r.raw) out += "," + format_optional(v);
    for (const auto& v : r.normalized) out += "," + format_optional(v);
    out += "," + r.missing_mask() + "\n";
  }
  return out;
}

inline std::string features_to_jsonl(std::span<const FeatureRecord> records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["window_id"] = r.window_id;
    j["dialogue_id"] = r.dialogue_id;
    j["label"] = state_code(r.label);
    for (Cue c : kAllCues) {
      const auto v = r.value(c);
      j[std::string(cue_name(c))] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    }
    for (Cue c : kAllCues) {
      const auto v = r.norm(c);
      j[std::string(cue_name(c)) + "_n"] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    }
    j["missing_mask"] = r.missing_mask();
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace cueload
