#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cueload/error.hpp"
#include "cueload/format.hpp"

namespace cueload {

enum class Speaker { Explainer, Explainee };

enum class State {
  Understanding = 0,
  PartialUnderstanding = 1,
  NonUnderstanding = 2,
  Misunderstanding = 3,
};

inline constexpr std::size_t kNumStates = 4;
inline constexpr std::array<State, kNumStates> kAllStates = {
    State::Understanding, State::PartialUnderstanding, State::NonUnderstanding,
    State::Misunderstanding};

inline std::string_view state_code(State s) {
  static constexpr std::array<std::string_view, kNumStates> codes = {"U", "PU", "NU",
                                                                     "MU"};
  return codes[static_cast<std::size_t>(s)];
}

inline std::optional<State> parse_state_code(std::string_view code) {
  for (State s : kAllStates) {
    if (state_code(s) == code) return s;
  }
  return std::nullopt;
}

inline std::string_view speaker_name(Speaker s) {
  return s == Speaker::Explainer ? "Explainer" : "Explainee";
}

struct Token {
  int position = 0;
  std::string surface;
  std::optional<int> head;  // nullopt when the utterance carries no tree
  std::string deprel;
  std::optional<double> start_time;
  std::optional<double> end_time;

  bool operator==(const Token&) const = default;
};

struct Utterance {
  std::string id;
  std::string dialogue_id;
  Speaker speaker = Speaker::Explainer;
  std::vector<Token> tokens;
  double start_time = 0.0;
  double end_time = 0.0;

  bool empty() const { return tokens.empty(); }
  bool has_tree() const { return !tokens.empty() && tokens.front().head.has_value(); }

  // Time span used for gaze alignment: token-level times when every token
  // carries them, otherwise the utterance-level span.
  std::pair<double, double> span() const {
    if (tokens.empty()) return {start_time, end_time};
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& t : tokens) {
      if (!t.start_time || !t.end_time) return {start_time, end_time};
      lo = first ? *t.start_time : std::min(lo, *t.start_time);
      hi = first ? *t.end_time : std::max(hi, *t.end_time);
      first = false;
    }
    return {lo, hi};
  }

  bool operator==(const Utterance&) const = default;
};

struct GazeSample {
  double time = 0.0;
  int label = 0;

  bool operator==(const GazeSample&) const = default;
};

inline constexpr int kMinGazeLabel = 1;
inline constexpr int kMaxGazeLabel = 81;

// Per-dialogue, time-sorted gaze samples.
using GazeStreams = std::map<std::string, std::vector<GazeSample>>;

struct UnderstandingAnnotation {
  std::string dialogue_id;
  std::string utterance_id;
  State state = State::Understanding;

  bool operator==(const UnderstandingAnnotation&) const = default;
};

// A window refers to utterances owned by the caller's utterance list; that
// list must outlive the window.
struct ContextWindow {
  std::string id;
  UnderstandingAnnotation annotation;
  const Utterance* prev = nullptr;
  const Utterance* curr = nullptr;
  const Utterance* next = nullptr;
  std::vector<GazeSample> gaze;
  double span_start = 0.0;
  double span_end = 0.0;

  // prev, curr, next in dialogue order, skipping absent neighbours.
  std::vector<const Utterance*> utterances() const {
    std::vector<const Utterance*> out;
    if (prev) out.push_back(prev);
    out.push_back(curr);
    if (next) out.push_back(next);
    return out;
  }
};

struct ConlluResult {
  std::vector<Utterance> utterances;
  std::size_t skipped_lines = 0;  // multi-word tokens and empty nodes
};

namespace detail {

inline void validate_tree(const Utterance& u) {
  const int n = static_cast<int>(u.tokens.size());
  int roots = 0;
  for (const auto& t : u.tokens) {
    const int h = *t.head;
    if (h == t.position) {
      throw StructureError("utterance " + u.id + ": token " + std::to_string(h) +
                           " is its own head");
    }
    if (h < 0 || h > n) {
      throw StructureError("utterance " + u.id + ": token " +
                           std::to_string(t.position) + " has head " +
                           std::to_string(h) + " outside 0.." + std::to_string(n));
    }
    if (h == 0) ++roots;
  }
  if (roots != 1) {
    throw StructureError("utterance " + u.id + ": expected exactly one root, found " +
                         std::to_string(roots));
  }
  // 0 = unvisited, 1 = on current path, 2 = reaches the root
  std::vector<int> state(static_cast<std::size_t>(n) + 1, 0);
  state[0] = 2;
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int node = start;
    while (state[static_cast<std::size_t>(node)] == 0) {
      state[static_cast<std::size_t>(node)] = 1;
      path.push_back(node);
      node = *u.tokens[static_cast<std::size_t>(node) - 1].head;
    }
    if (state[static_cast<std::size_t>(node)] == 1) {
      throw StructureError("utterance " + u.id + ": cyclic head graph through token " +
                           std::to_string(node));
    }
    for (int p : path) state[static_cast<std::size_t>(p)] = 2;
  }
}

inline void parse_misc(std::string_view misc, Token& token, const std::string& source,
                       std::size_t line) {
  if (misc == "_") return;
  for (auto item : split(misc, '|')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key != "Start" && key != "End") continue;
    auto v = parse_double(value);
    if (!v || *v < 0.0) {
      throw ParseError(source, line, "invalid token time '" + std::string(item) + "'");
    }
    (key == "Start" ? token.start_time : token.end_time) = *v;
  }
  if (token.start_time && token.end_time && *token.start_time > *token.end_time) {
    throw ParseError(source, line, "token start time after end time");
  }
}

}  // namespace detail

// Reads CoNLL-U with per-sentence `# key = value` metadata. Required keys:
// dialogue_id, utterance_id, speaker, start, end. A sentence whose HEAD column
// is `_` throughout is kept as an utterance without a tree.
inline ConlluResult parse_conllu(std::string_view text,
                                 const std::string& source = "<conllu>") {
  ConlluResult result;
  std::map<std::string, std::string, std::less<>> meta;
  Utterance current;
  std::size_t sentence_line = 0;
  bool in_sentence = false;
  std::size_t missing_heads = 0;

  auto flush = [&](std::size_t line_no) {
    if (!in_sentence) return;
    static constexpr std::array<std::string_view, 5> required = {
        "dialogue_id", "utterance_id", "speaker", "start", "end"};
    for (auto key : required) {
      if (meta.find(key) == meta.end()) {
        throw ParseError(source, sentence_line,
                         "missing required metadata '" + std::string(key) + "'");
      }
    }
    current.dialogue_id = meta.find("dialogue_id")->second;
    current.id = meta.find("utterance_id")->second;
    const auto& speaker = meta.find("speaker")->second;
    if (speaker == "Explainer" || speaker == "explainer") {
      current.speaker = Speaker::Explainer;
    } else if (speaker == "Explainee" || speaker == "explainee") {
      current.speaker = Speaker::Explainee;
    } else {
      throw ParseError(source, sentence_line, "unknown speaker '" + speaker + "'");
    }
    auto start = parse_double(meta.find("start")->second);
    auto end = parse_double(meta.find("end")->second);
    if (!start || !end || *start < 0.0 || *start > *end) {
      throw ParseError(source, sentence_line, "invalid utterance time span");
    }
    current.start_time = *start;
    current.end_time = *end;
    for (std::size_t i = 0; i < current.tokens.size(); ++i) {
      if (current.tokens[i].position != static_cast<int>(i) + 1) {
        throw StructureError("utterance " + current.id +
                             ": token positions are not consecutive from 1");
      }
    }
    if (missing_heads != 0 && missing_heads != current.tokens.size()) {
      throw StructureError("utterance " + current.id + ": partially annotated tree");
    }
    if (!current.tokens.empty() && missing_heads == 0) detail::validate_tree(current);
    (void)line_no;
    result.utterances.push_back(std::move(current));
    current = Utterance{};
    meta.clear();
    in_sentence = false;
    missing_heads = 0;
  };

  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto line = lines[i];
    if (trim(line).empty()) {
      flush(line_no);
      continue;
    }
    if (!in_sentence) {
      in_sentence = true;
      sentence_line = line_no;
    }
    if (line.front() == '#') {
      auto body = line.substr(1);
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        meta[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
      }
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(source, line_no,
                       "expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()));
    }
    if (cols[0].find('-') != std::string_view::npos ||
        cols[0].find('.') != std::string_view::npos) {
      ++result.skipped_lines;
      continue;
    }
    Token token;
    auto id = parse_int(cols[0]);
    if (!id || *id < 1) throw ParseError(source, line_no, "invalid token id");
    token.position = static_cast<int>(*id);
    token.surface = std::string(cols[1]);
    if (cols[6] == "_") {
      ++missing_heads;
    } else {
      auto head = parse_int(cols[6]);
      if (!head || *head < 0) throw ParseError(source, line_no, "invalid head");
      token.head = static_cast<int>(*head);
    }
    token.deprel = cols[7] == "_" ? std::string() : std::string(cols[7]);
    detail::parse_misc(cols[9], token, source, line_no);
    current.tokens.push_back(std::move(token));
  }
  flush(lines.size() + 1);
  return result;
}

// Inverse of parse_conllu for the fields this toolkit models.
inline std::string write_conllu(std::span<const Utterance> utterances) {
  std::string out;
  for (const auto& u : utterances) {
    out += "# dialogue_id = " + u.dialogue_id + "\n";
    out += "# utterance_id = " + u.id + "\n";
    out += "# speaker = " + std::string(speaker_name(u.speaker)) + "\n";
    out += "# start = " + format_double(u.start_time) + "\n";
    out += "# end = " + format_double(u.end_time) + "\n";
    for (const auto& t : u.tokens) {
      std::string misc;
      if (t.start_time) misc += "Start=" + format_double(*t.start_time);
      if (t.end_time) {
        if (!misc.empty()) misc += "|";
        misc += "End=" + format_double(*t.end_time);
      }
      out += std::to_string(t.position) + "\t" + t.surface + "\t_\t_\t_\t_\t" +
             (t.head ? std::to_string(*t.head) : std::string("_")) + "\t" +
             (t.deprel.empty() ? std::string("_") : t.deprel) + "\t_\t" +
             (misc.empty() ? std::string("_") : misc) + "\n";
    }
    out += "\n";
  }
  return out;
}

namespace detail {

inline void expect_header(std::span<const std::string_view> lines, std::string_view header,
                          const std::string& source) {
  if (lines.empty() || trim(lines[0]) != header) {
    throw ParseError(source, 1, "expected header '" + std::string(header) + "'");
  }
}

}  // namespace detail

// CSV `dialogue_id,time,label`. Labels must lie in [1, 81]; times must not
// decrease within a dialogue (rows of different dialogues may interleave).
inline GazeStreams parse_gaze(std::string_view text, const std::string& source = "<gaze>") {
  const auto lines = lines_of(text);
  detail::expect_header(lines, "dialogue_id,time,label", source);
  GazeStreams streams;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto cols = split(lines[i], ',');
    if (cols.size() != 3) throw ParseError(source, i + 1, "expected 3 columns");
    auto time = parse_double(trim(cols[1]));
    auto label = parse_int(trim(cols[2]));
    if (!time || *time < 0.0) throw ParseError(source, i + 1, "invalid time");
    if (!label) throw ParseError(source, i + 1, "invalid label");
    if (*label < kMinGazeLabel || *label > kMaxGazeLabel) {
      throw ValidationError(source + ":" + std::to_string(i + 1) + ": gaze label " +
                            std::to_string(*label) + " outside [1, 81]");
    }
    auto& samples = streams[std::string(trim(cols[0]))];
    if (!samples.empty() && *time < samples.back().time) {
      throw ValidationError(source + ":" + std::to_string(i + 1) +
                            ": time decreases within dialogue (row " +
                            std::string(lines[i]) + ")");
    }
    samples.push_back({*time, static_cast<int>(*label)});
  }
  return streams;
}

inline std::vector<UnderstandingAnnotation> parse_annotations(
    std::string_view text, const std::string& source = "<annotations>") {
  const auto lines = lines_of(text);
  detail::expect_header(lines, "dialogue_id,utterance_id,state", source);
  std::vector<UnderstandingAnnotation> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto cols = split(lines[i], ',');
    if (cols.size() != 3) throw ParseError(source, i + 1, "expected 3 columns");
    auto state = parse_state_code(trim(cols[2]));
    if (!state) {
      throw ParseError(source, i + 1, "unknown state '" + std::string(trim(cols[2])) + "'");
    }
    out.push_back({std::string(trim(cols[0])), std::string(trim(cols[1])), *state});
  }
  return out;
}

inline std::array<std::size_t, kNumStates> state_counts(
    std::span<const UnderstandingAnnotation> annotations) {
  std::array<std::size_t, kNumStates> counts{};
  for (const auto& a : annotations) ++counts[static_cast<std::size_t>(a.state)];
  return counts;
}

// Samples with time in [lo, hi], from a time-sorted stream.
inline std::vector<GazeSample> gaze_in_span(std::span<const GazeSample> samples, double lo,
                                            double hi) {
  auto first = std::lower_bound(samples.begin(), samples.end(), lo,
                                [](const GazeSample& s, double t) { return s.time < t; });
  auto last = std::upper_bound(first, samples.end(), hi,
                               [](double t, const GazeSample& s) { return t < s.time; });
  return {first, last};
}

// One window per annotation: the anchor utterance plus its immediate
// neighbours within the dialogue, and the gaze samples covering the joint
// time span.
inline std::vector<ContextWindow> build_context_windows(
    std::span<const Utterance> utterances,
    std::span<const UnderstandingAnnotation> annotations, const GazeStreams& gaze) {
  std::map<std::string, std::vector<const Utterance*>> dialogues;
  std::map<std::pair<std::string, std::string>, std::size_t> position;
  for (const auto& u : utterances) {
    auto& seq = dialogues[u.dialogue_id];
    if (!position.emplace(std::pair{u.dialogue_id, u.id}, seq.size()).second) {
      throw ValidationError("duplicate utterance id " + u.id + " in dialogue " +
                            u.dialogue_id);
    }
    seq.push_back(&u);
  }

  std::vector<ContextWindow> windows;
  windows.reserve(annotations.size());
  std::map<std::string, std::size_t> id_uses;
  for (const auto& a : annotations) {
    auto it = position.find({a.dialogue_id, a.utterance_id});
    if (it == position.end()) {
      throw ResolutionError("annotation references missing utterance " + a.utterance_id +
                            " in dialogue " + a.dialogue_id);
    }
    const auto& seq = dialogues[a.dialogue_id];
    const std::size_t idx = it->second;
    ContextWindow w;
    w.annotation = a;
    w.id = a.dialogue_id + ":" + a.utterance_id;
    if (const std::size_t n = id_uses[w.id]++; n > 0) w.id += "#" + std::to_string(n + 1);
    w.curr = seq[idx];
    if (idx > 0) w.prev = seq[idx - 1];
    if (idx + 1 < seq.size()) w.next = seq[idx + 1];

    auto [lo, hi] = w.curr->span();
    if (w.prev) lo = std::min(lo, w.prev->span().first);
    if (w.next) hi = std::max(hi, w.next->span().second);
    w.span_start = lo;
    w.span_end = hi;
    if (auto g = gaze.find(a.dialogue_id); g != gaze.end()) {
      w.gaze = gaze_in_span(g->second, lo, hi);
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace cueload
