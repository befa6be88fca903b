#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cueload/corpus.hpp"
#include "cueload/error.hpp"
#include "cueload/format.hpp"
#include "cueload/ngram.hpp"
#include "cueload/text.hpp"

namespace cueload {

// Mean negative log-probability, in nats. Shared by information value and
// average gaze entropy, which differ only in what they score.
inline double mean_surprisal(std::span<const double> logprobs) {
  if (logprobs.empty()) throw UndefinedValueError("mean surprisal of an empty sequence");
  double sum = 0.0;
  for (double lp : logprobs) sum += lp;
  return -sum / static_cast<double>(logprobs.size());
}

inline double information_value(std::span<const std::string> tokens, const WordModel& model) {
  if (tokens.empty()) throw UndefinedValueError("information value of an empty utterance");
  const auto lps = model.token_logprobs(tokens);
  return mean_surprisal(lps);
}

inline double information_value(std::span<const double> imported_logprobs) {
  return mean_surprisal(imported_logprobs);
}

inline double gaze_entropy(std::span<const int> labels, const GazeModel& model) {
  if (labels.empty()) throw UndefinedValueError("gaze entropy of an empty label sequence");
  const auto lps = model.token_logprobs(labels);
  return mean_surprisal(lps);
}

inline double gaze_entropy(std::span<const double> imported_logprobs) {
  return mean_surprisal(imported_logprobs);
}

struct TokenLogProbRecord {
  std::string dialogue_id;
  std::string utterance_id;
  std::vector<std::string> tokens;
  std::vector<double> logprobs;
};

// Gaze exchange records are keyed by the window's anchor utterance and carry
// the window's aligned label sequence.
struct GazeLogProbRecord {
  std::string dialogue_id;
  std::string utterance_id;
  std::vector<int> labels;
  std::vector<double> logprobs;
};

using RecordKey = std::pair<std::string, std::string>;  // (dialogue_id, utterance_id)

namespace detail {

inline void check_logprobs(const std::vector<double>& lps, std::size_t n_items,
                           const std::string& where) {
  if (lps.size() != n_items) {
    throw ValidationError(where + ": " + std::to_string(n_items) + " items but " +
                          std::to_string(lps.size()) + " logprobs");
  }
  for (double lp : lps) {
    if (!std::isfinite(lp) || lp > 0.0) {
      throw ValidationError(where + ": logprob " + format_double(lp) +
                            " is not a finite value <= 0");
    }
  }
}

template <class Record, class Fill>
std::map<RecordKey, Record> parse_jsonl(std::string_view text, const std::string& source,
                                        Fill fill) {
  std::map<RecordKey, Record> out;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = source + ":" + std::to_string(i + 1);
    Record rec;
    try {
      const auto j = nlohmann::json::parse(lines[i]);
      rec.dialogue_id = j.at("dialogue_id").get<std::string>();
      rec.utterance_id = j.at("utterance_id").get<std::string>();
      fill(j, rec);
      rec.logprobs = j.at("logprobs").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, i + 1, e.what());
    }
    RecordKey key{rec.dialogue_id, rec.utterance_id};
    if (out.count(key)) throw ValidationError(where + ": duplicate record");
    out.emplace(std::move(key), std::move(rec));
  }
  return out;
}

}  // namespace detail

inline std::map<RecordKey, TokenLogProbRecord> import_logprobs(
    std::string_view text, const std::string& source = "<logprobs>") {
  return detail::parse_jsonl<TokenLogProbRecord>(
      text, source, [&](const nlohmann::json& j, TokenLogProbRecord& rec) {
        rec.tokens = j.at("tokens").get<std::vector<std::string>>();
        detail::check_logprobs(j.at("logprobs").get<std::vector<double>>(), rec.tokens.size(),
                               source + " record " + rec.utterance_id);
      });
}

inline std::map<RecordKey, GazeLogProbRecord> import_gaze_logprobs(
    std::string_view text, const std::string& source = "<gaze-logprobs>") {
  return detail::parse_jsonl<GazeLogProbRecord>(
      text, source, [&](const nlohmann::json& j, GazeLogProbRecord& rec) {
        rec.labels = j.at("labels").get<std::vector<int>>();
        for (int label : rec.labels) {
          if (label < kMinGazeLabel || label > kMaxGazeLabel) {
            throw ValidationError(source + " record " + rec.utterance_id +
                                  ": gaze label outside [1, 81]");
          }
        }
        detail::check_logprobs(j.at("logprobs").get<std::vector<double>>(), rec.labels.size(),
                               source + " record " + rec.utterance_id);
      });
}

// Every utterance that has a record must match its normalized tokens
// exactly; records naming unknown utterances are rejected too.
inline void check_alignment(const std::map<RecordKey, TokenLogProbRecord>& records,
                            std::span<const Utterance> utterances) {
  std::map<RecordKey, const Utterance*> index;
  for (const auto& u : utterances) index[{u.dialogue_id, u.id}] = &u;
  for (const auto& [key, rec] : records) {
    auto it = index.find(key);
    if (it == index.end()) {
      throw AlignmentError("logprob record for unknown utterance " + key.second +
                           " in dialogue " + key.first);
    }
    if (normalized_tokens(*it->second) != rec.tokens) {
      throw AlignmentError("logprob record tokens differ from corpus tokens for utterance " +
                           key.second + " in dialogue " + key.first);
    }
  }
}

// Exchange-format export of the normalized corpus tokens, one JSON object per
// utterance, for external scorers.
inline std::string export_tokens_jsonl(std::span<const Utterance> utterances) {
  std::string out;
  for (const auto& u : utterances) {
    nlohmann::json j = {{"dialogue_id", u.dialogue_id},
                        {"utterance_id", u.id},
                        {"tokens", normalized_tokens(u)}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace cueload
