#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cueload/error.hpp"

namespace cueload {

// Fixed-order n-gram model with add-k smoothing over a closed event set
// {vocabulary, UNK, EOS}. BOS only ever appears in contexts. Every
// conditional distribution, including those of unseen contexts, is
//   P(e | ctx) = (c(ctx, e) + k) / (c(ctx) + k * V)
// with V the event count, so it sums to one and is strictly positive.
//
// Symbol ids: 0 = UNK, 1 = EOS, 2 = BOS, 3 + i = vocabulary()[i].
template <class Symbol>
class NGramModel {
 public:
  using Id = std::uint32_t;
  using Context = std::vector<Id>;
  static constexpr Id kUnk = 0;
  static constexpr Id kEos = 1;
  static constexpr Id kBos = 2;
  static constexpr Id kFirstSymbol = 3;
  static constexpr int kMaxOrder = 5;

  struct ContextCounts {
    std::map<Id, double> counts;
    double total = 0.0;
  };

  NGramModel(int order, double k, std::vector<Symbol> vocabulary)
      : order_(order), k_(k), vocabulary_(std::move(vocabulary)) {
    if (order < 1 || order > kMaxOrder) {
      throw UsageError("n-gram order must lie in [1, 5], got " + std::to_string(order));
    }
    if (!(k > 0.0) || !std::isfinite(k)) throw UsageError("smoothing k must be > 0");
    std::sort(vocabulary_.begin(), vocabulary_.end());
    vocabulary_.erase(std::unique(vocabulary_.begin(), vocabulary_.end()), vocabulary_.end());
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
      index_.emplace(vocabulary_[i], static_cast<Id>(i) + kFirstSymbol);
    }
  }

  // Trains on `sequences`. Without `fixed_vocabulary` the vocabulary is the
  // set of training symbols; with it, out-of-vocabulary training symbols
  // count as UNK.
  static NGramModel train(std::span<const std::vector<Symbol>> sequences, int order, double k,
                          std::optional<std::vector<Symbol>> fixed_vocabulary = std::nullopt) {
    if (sequences.empty()) throw ValidationError("cannot train an n-gram model on no data");
    std::vector<Symbol> vocab;
    if (fixed_vocabulary) {
      vocab = std::move(*fixed_vocabulary);
    } else {
      for (const auto& seq : sequences) vocab.insert(vocab.end(), seq.begin(), seq.end());
    }
    NGramModel model(order, k, std::move(vocab));
    for (const auto& seq : sequences) model.add_sequence(seq);
    return model;
  }

  int order() const { return order_; }
  double smoothing() const { return k_; }
  const std::vector<Symbol>& vocabulary() const { return vocabulary_; }
  std::size_t event_count() const { return vocabulary_.size() + 2; }
  const std::map<Context, ContextCounts>& counts() const { return counts_; }

  Id id_of(const Symbol& s) const {
    auto it = index_.find(s);
    return it == index_.end() ? kUnk : it->second;
  }

  // All event ids in ascending order (UNK, EOS, vocabulary...).
  std::vector<Id> events() const {
    std::vector<Id> out{kUnk, kEos};
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
      out.push_back(static_cast<Id>(i) + kFirstSymbol);
    }
    return out;
  }

  double prob(const Context& context, Id event) const {
    const double v = static_cast<double>(event_count());
    auto it = counts_.find(context);
    if (it == counts_.end()) return 1.0 / v;
    auto c = it->second.counts.find(event);
    const double count = c == it->second.counts.end() ? 0.0 : c->second;
    return (count + k_) / (it->second.total + k_ * v);
  }

  double log_prob(const Context& context, Id event) const {
    return std::log(prob(context, event));
  }

  // Natural-log conditional probability of each symbol of `seq` given its
  // BOS-padded history. EOS is not included.
  std::vector<double> token_logprobs(std::span<const Symbol> seq) const {
    std::vector<double> out;
    out.reserve(seq.size());
    Context ctx(static_cast<std::size_t>(order_ - 1), kBos);
    for (const auto& s : seq) {
      const Id id = id_of(s);
      out.push_back(log_prob(ctx, id));
      shift(ctx, id);
    }
    return out;
  }

  // Full chain-rule log-likelihood including the EOS term.
  double sequence_logprob(std::span<const Symbol> seq) const {
    double total = 0.0;
    Context ctx(static_cast<std::size_t>(order_ - 1), kBos);
    for (const auto& s : seq) {
      const Id id = id_of(s);
      total += log_prob(ctx, id);
      shift(ctx, id);
    }
    return total + log_prob(ctx, kEos);
  }

  nlohmann::json to_json() const {
    nlohmann::json contexts = nlohmann::json::array();
    for (const auto& [ctx, cc] : counts_) {
      nlohmann::json counts = nlohmann::json::array();
      for (const auto& [id, c] : cc.counts) counts.push_back({id, c});
      contexts.push_back({{"context", ctx}, {"counts", counts}});
    }
    return {{"format", "cueload-ngram"}, {"version", 1},       {"order", order_},
            {"k", k_},                   {"vocabulary", vocabulary_}, {"contexts", contexts}};
  }

  static NGramModel from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "cueload-ngram" || j.value("version", 0) != 1) {
      throw ValidationError("not a cueload-ngram v1 model dump");
    }
    NGramModel model(j.at("order").get<int>(), j.at("k").get<double>(),
                     j.at("vocabulary").get<std::vector<Symbol>>());
    const Id max_id = static_cast<Id>(model.vocabulary_.size()) + kFirstSymbol;
    for (const auto& entry : j.at("contexts")) {
      auto ctx = entry.at("context").get<Context>();
      if (ctx.size() != static_cast<std::size_t>(model.order_ - 1)) {
        throw ValidationError("model dump context has wrong length");
      }
      auto& cc = model.counts_[ctx];
      for (const auto& pair : entry.at("counts")) {
        const Id id = pair.at(0).get<Id>();
        const double c = pair.at(1).get<double>();
        if (id == kBos || id >= max_id || c < 0.0) {
          throw ValidationError("model dump has invalid count entry");
        }
        cc.counts[id] += c;
        cc.total += c;
      }
    }
    return model;
  }

 private:
  void shift(Context& ctx, Id id) const {
    if (ctx.empty()) return;
    std::rotate(ctx.begin(), ctx.begin() + 1, ctx.end());
    ctx.back() = id;
  }

  void add_sequence(std::span<const Symbol> seq) {
    Context ctx(static_cast<std::size_t>(order_ - 1), kBos);
    for (const auto& s : seq) {
      const Id id = id_of(s);
      auto& cc = counts_[ctx];
      cc.counts[id] += 1.0;
      cc.total += 1.0;
      shift(ctx, id);
    }
    auto& cc = counts_[ctx];
    cc.counts[kEos] += 1.0;
    cc.total += 1.0;
  }

  int order_;
  double k_;
  std::vector<Symbol> vocabulary_;
  std::map<Symbol, Id> index_;
  std::map<Context, ContextCounts> counts_;
};

using WordModel = NGramModel<std::string>;
using GazeModel = NGramModel<int>;

inline std::vector<int> gaze_vocabulary() {
  std::vector<int> v;
  for (int label = 1; label <= 81; ++label) v.push_back(label);
  return v;
}

inline WordModel train_word_ngram(std::span<const std::vector<std::string>> sequences,
                                  int order = 2, double k = 0.1) {
  return WordModel::train(sequences, order, k);
}

inline GazeModel train_gaze_ngram(std::span<const std::vector<int>> sequences, int order = 3,
                                  double k = 0.1) {
  return GazeModel::train(sequences, order, k, gaze_vocabulary());
}

}  // namespace cueload
