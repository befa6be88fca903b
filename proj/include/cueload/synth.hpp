#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cueload/corpus.hpp"
#include "cueload/error.hpp"
#include "cueload/format.hpp"
#include "cueload/rng.hpp"

namespace cueload {

// How strongly each cue (and the window text) depends on the window's state.
// Zero everywhere yields labels independent of every feature.
struct SignalStrengths {
  double info = 0.0;
  double gaze = 0.0;
  double syntax = 0.0;
  double text = 0.0;
};

struct GeneratorConfig {
  int n_dialogues = 24;
  int utterances_per_dialogue = 32;
  int vocabulary_size = 200;
  SignalStrengths signal;
  double gaze_rate_hz = 10.0;
  std::uint64_t seed = 0;
  // U, PU, NU, MU proportions.
  std::array<double, kNumStates> priors = {176.0, 162.0, 191.0, 113.0};

  void validate() const {
    if (n_dialogues < 1 || utterances_per_dialogue < 4 || vocabulary_size < 8) {
      throw UsageError("generator counts too small (dialogues >= 1, utterances >= 4, "
                       "vocabulary >= 8)");
    }
    if (!(gaze_rate_hz > 0.0) || !std::isfinite(gaze_rate_hz)) {
      throw UsageError("gaze rate must be positive");
    }
    for (double s : {signal.info, signal.gaze, signal.syntax, signal.text}) {
      if (!std::isfinite(s) || s < 0.0) throw UsageError("signal strengths must be finite, >= 0");
    }
    double total = 0.0;
    for (double p : priors) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw UsageError("priors must be finite, >= 0");
      total += p;
    }
    if (total <= 0.0) throw UsageError("priors must not all be zero");
  }
};

struct SyntheticCorpus {
  std::string conllu;
  std::string gaze_csv;
  std::string annotations_csv;
};

// Splits `total` items across weights by largest remainder; ties favour the
// lower index.
inline std::vector<std::size_t> allocate_counts(std::span<const double> weights,
                                                std::size_t total) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[i];
    rem.emplace_back(exact - static_cast<double>(out[i]), i);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++out[rem[i % rem.size()].second];
  return out;
}

namespace detail {

// State directions on (info, gaze, syntax): vertices of a regular
// tetrahedron, so every pair of states differs in two of the three cues.
inline constexpr std::array<std::array<double, 3>, kNumStates> kStateDirections = {{
    {+1.0, +1.0, -1.0},  // U
    {+1.0, -1.0, +1.0},  // PU
    {-1.0, +1.0, +1.0},  // NU
    {-1.0, -1.0, -1.0},  // MU
}};

inline std::string pseudo_word(std::size_t index) {
  static constexpr std::array<const char*, 16> onsets = {"b", "d", "f", "g", "k", "l", "m", "n",
                                                         "p", "r", "s", "t", "v", "w", "z", "h"};
  static constexpr std::array<const char*, 5> vowels = {"a", "e", "i", "o", "u"};
  std::string w;
  std::size_t x = index + 1;
  do {
    w += onsets[x % onsets.size()];
    x /= onsets.size();
    w += vowels[x % vowels.size()];
    x /= vowels.size();
  } while (x > 0);
  return w;
}

struct Generated {
  std::vector<Utterance> utterances;
  std::vector<GazeSample> gaze;
};

class DialogueWriter {
 public:
  DialogueWriter(const GeneratorConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng) {
    const auto v = static_cast<std::size_t>(cfg.vocabulary_size);
    for (std::size_t i = 0; i < v; ++i) {
      vocab_.push_back(pseudo_word(i));
      zipf_.push_back(1.0 / static_cast<double>(i + 1));
    }
    for (std::size_t s = 0; s < kNumStates; ++s) {
      for (std::size_t m = 0; m < 4; ++m) markers_[s].push_back(pseudo_word(v + 4 * s + m));
    }
  }

  // state < 0 draws from the baseline parameters (unannotated material).
  Utterance explainer_utterance(const std::string& dialogue, const std::string& id, double& clock,
                                int state) {
    const auto* d = state >= 0 ? &kStateDirections[static_cast<std::size_t>(state)] : nullptr;
    const double info_shift = d ? cfg_.signal.info * (*d)[0] : 0.0;
    const double syn_shift = d ? cfg_.signal.syntax * (*d)[2] : 0.0;
    const double rare = std::clamp(0.25 + 0.2 * info_shift, 0.0, 1.0);
    const double marker = state >= 0 ? std::clamp(0.15 * cfg_.signal.text, 0.0, 1.0) : 0.0;
    const int length =
        std::max(2, static_cast<int>(std::lround(rng_.normal(8.0 + 3.0 * syn_shift, 2.0))));

    Utterance u;
    u.dialogue_id = dialogue;
    u.id = id;
    u.speaker = Speaker::Explainer;
    u.start_time = round_time(clock);
    // Right-spine attachment keeps every tree projective.
    std::vector<int> spine;
    for (int pos = 1; pos <= length; ++pos) {
      Token t;
      t.position = pos;
      std::string word;
      if (marker > 0.0 && rng_.bernoulli(marker)) {
        const auto& m = markers_[static_cast<std::size_t>(state)];
        word = m[rng_.index(m.size())];
      } else if (rng_.bernoulli(rare)) {
        const std::size_t half = vocab_.size() / 2;
        word = vocab_[half + rng_.index(vocab_.size() - half)];
      } else {
        word = vocab_[rng_.categorical(zipf_)];
      }
      if (pos == 1) word[0] = static_cast<char>(word[0] - 32);
      t.surface = word;
      if (pos == 1) {
        t.head = 0;
        t.deprel = "root";
        spine.push_back(1);
      } else {
        const std::size_t at = rng_.bernoulli(0.5) ? spine.size() - 1 : rng_.index(spine.size());
        t.head = spine[at];
        t.deprel = "dep";
        spine.resize(at + 1);
        spine.push_back(pos);
      }
      u.tokens.push_back(std::move(t));
    }
    Token stop;
    stop.position = length + 1;
    stop.surface = ".";
    stop.head = 1;
    stop.deprel = "punct";
    u.tokens.push_back(stop);
    clock += 0.3 * static_cast<double>(u.tokens.size());
    u.end_time = round_time(clock);
    clock += 0.2;
    return u;
  }

  Utterance backchannel(const std::string& dialogue, const std::string& id, double& clock) {
    static constexpr std::array<const char*, 4> words = {"ja", "mhm", "okay", "genau"};
    Utterance u;
    u.dialogue_id = dialogue;
    u.id = id;
    u.speaker = Speaker::Explainee;
    u.start_time = round_time(clock);
    Token t;
    t.position = 1;
    t.surface = words[rng_.index(words.size())];
    t.head = 0;
    t.deprel = "root";
    u.tokens.push_back(t);
    clock += 0.4;
    u.end_time = round_time(clock);
    clock += 0.2;
    return u;
  }

  // Gaze labels from `from` to `to` (seconds) as a two-regime Markov chain:
  // on-explainer (41) vs averted. `state` raises or lowers the switch rate.
  void gaze(std::vector<GazeSample>& out, double from, double to, int state) {
    const double g = state >= 0
                         ? cfg_.signal.gaze * kStateDirections[static_cast<std::size_t>(state)][1]
                         : 0.0;
    const double leave = std::clamp(0.15 + 0.1 * g, 0.01, 0.9);
    const double step = 1.0 / cfg_.gaze_rate_hz;
    while (true) {
      const double t = static_cast<double>(tick_) * step;
      if (t >= to) break;
      if (t >= from) {
        if (label_ == 41) {
          if (rng_.bernoulli(leave)) label_ = averted_label();
        } else if (rng_.bernoulli(0.5)) {
          label_ = 41;
        } else if (rng_.bernoulli(leave)) {
          label_ = averted_label();
        }
        out.push_back({round_time(t), label_});
      }
      ++tick_;
    }
  }

  void reset_gaze() {
    tick_ = 0;
    label_ = 41;
  }

 private:
  // Neighbourhood of the on-explainer cell in the 9x9 label grid.
  int averted_label() {
    static constexpr std::array<int, 8> near = {31, 32, 33, 40, 42, 49, 50, 51};
    if (rng_.bernoulli(0.8)) return near[rng_.index(near.size())];
    int l;
    do {
      l = 1 + static_cast<int>(rng_.index(81));
    } while (l == 41);
    return l;
  }

  static double round_time(double t) { return std::round(t * 1000.0) / 1000.0; }

  const GeneratorConfig& cfg_;
  Rng& rng_;
  std::vector<std::string> vocab_;
  std::vector<double> zipf_;
  std::array<std::vector<std::string>, kNumStates> markers_;
  std::size_t tick_ = 0;
  int label_ = 41;
};

}  // namespace detail

// Toy corpus: each dialogue is a run of blocks, each block three explainer
// utterances whose middle one carries an annotation, followed by an explainee
// backchannel. The block's state shifts word rarity (information value),
// utterance length (syntactic complexity), gaze switching (gaze entropy) and
// marker-word frequency (text) by the configured strengths.
inline SyntheticCorpus generate_corpus(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto per = static_cast<std::size_t>(cfg.utterances_per_dialogue);
  const std::size_t blocks = per / 4;
  const std::size_t total = blocks * static_cast<std::size_t>(cfg.n_dialogues);

  const auto counts = allocate_counts(cfg.priors, total);
  std::vector<int> labels;
  for (std::size_t s = 0; s < kNumStates; ++s) {
    labels.insert(labels.end(), counts[s], static_cast<int>(s));
  }
  rng.shuffle(std::span(labels));

  detail::DialogueWriter writer(cfg, rng);
  std::vector<Utterance> utterances;
  std::string gaze_csv = "dialogue_id,time,label\n";
  std::string ann_csv = "dialogue_id,utterance_id,state\n";
  std::size_t next_label = 0;
  for (int d = 0; d < cfg.n_dialogues; ++d) {
    const std::string dialogue = "d" + std::to_string(d + 1);
    double clock = 0.0;
    std::vector<GazeSample> gaze;
    writer.reset_gaze();
    std::size_t made = 0;
    auto uid = [&] { return "u" + std::to_string(++made); };
    for (std::size_t b = 0; b < blocks; ++b) {
      const int state = labels[next_label++];
      const double block_start = clock;
      for (int i = 0; i < 3; ++i) {
        const std::string id = uid();
        if (i == 1) {
          ann_csv += dialogue + "," + id + "," +
                     std::string(state_code(static_cast<State>(state))) + "\n";
        }
        utterances.push_back(writer.explainer_utterance(dialogue, id, clock, state));
      }
      writer.gaze(gaze, block_start, clock, state);
      const double bc_start = clock;
      utterances.push_back(writer.backchannel(dialogue, uid(), clock));
      writer.gaze(gaze, bc_start, clock, -1);
    }
    while (made < per) {
      const double start = clock;
      utterances.push_back(writer.explainer_utterance(dialogue, uid(), clock, -1));
      writer.gaze(gaze, start, clock, -1);
    }
    for (const auto& g : gaze) {
      gaze_csv += dialogue + "," + format_double(g.time) + "," + std::to_string(g.label) + "\n";
    }
  }
  return {write_conllu(utterances), std::move(gaze_csv), std::move(ann_csv)};
}

}  // namespace cueload
