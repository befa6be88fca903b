#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cueload/boosted.hpp"
#include "cueload/corpus.hpp"
#include "cueload/evaluation.hpp"
#include "cueload/features.hpp"
#include "cueload/forest.hpp"
#include "cueload/fusion.hpp"
#include "cueload/lm.hpp"
#include "cueload/tfidf.hpp"

namespace cueload {

enum class ClassifierKind { Forest, Boosted, Fusion };
enum class FeatureSetting { TextOnly, TextAndCues };

inline std::string_view classifier_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::Forest: return "forest";
    case ClassifierKind::Boosted: return "boosted";
    case ClassifierKind::Fusion: return "fusion";
  }
  return "?";
}

inline std::optional<ClassifierKind> parse_classifier(std::string_view name) {
  for (auto k : {ClassifierKind::Forest, ClassifierKind::Boosted, ClassifierKind::Fusion}) {
    if (classifier_name(k) == name) return k;
  }
  return std::nullopt;
}

inline std::string_view setting_name(FeatureSetting s) {
  return s == FeatureSetting::TextOnly ? "text" : "text+cues";
}

struct ClassifySuiteConfig {
  ForestConfig forest;
  BoostedConfig boosted;
  FusionConfig fusion;
  std::size_t max_text_features = 1000;
  // Cues fed to the classifiers; dependency length is left out by default.
  std::vector<Cue> cues = {Cue::InfoValue, Cue::GazeEntropy, Cue::Syntax};
  bool paper_parity = false;  // min-max fitted on all records instead of the training rows
  ImputePolicy impute = ImputeMean{};
  std::uint64_t seed = 0;
};

// Records plus optional per-record dense embeddings (all one dimension).
struct ClassifyDataset {
  std::span<const FeatureRecord> records;
  std::span<const std::vector<double>> embeddings;  // empty or one per record

  std::vector<int> labels() const {
    std::vector<int> y;
    y.reserve(records.size());
    for (const auto& r : records) y.push_back(static_cast<int>(r.label));
    return y;
  }
};

namespace detail {

// Normalized, imputed cue values for every record, with all fitting done on
// `train` (or on everything with --paper-parity).
inline std::vector<std::vector<double>> fold_cues(const ClassifyDataset& data,
                                                  std::span<const std::size_t> train,
                                                  const ClassifySuiteConfig& cfg) {
  std::vector<std::size_t> all(data.records.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto scaler =
      MinMaxScaler::fit(data.records, cfg.paper_parity ? std::span<const std::size_t>(all) : train);
  std::vector<FeatureRecord> normed(data.records.begin(), data.records.end());
  scaler.apply(normed);
  const auto fill = impute_fill_values(normed, train, std::holds_alternative<ImputeDrop>(cfg.impute)
                                                          ? ImputePolicy{ImputeMean{}}
                                                          : cfg.impute);
  std::vector<std::vector<double>> out(normed.size());
  for (std::size_t i = 0; i < normed.size(); ++i) {
    for (Cue c : cfg.cues) {
      const auto v = normed[i].norm(c);
      out[i].push_back(v ? *v : fill[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

// Embedding columns standardized with training-row statistics.
inline std::vector<std::vector<double>> fold_embeddings(const ClassifyDataset& data,
                                                        std::span<const std::size_t> train) {
  if (data.embeddings.empty()) return {};
  const std::size_t dim = data.embeddings.front().size();
  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  for (auto i : train) {
    for (std::size_t j = 0; j < dim; ++j) mean[j] += data.embeddings[i][j];
  }
  for (auto& m : mean) m /= static_cast<double>(train.size());
  for (auto i : train) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = data.embeddings[i][j] - mean[j];
      sd[j] += d * d;
    }
  }
  for (auto& s : sd) s = std::sqrt(s / static_cast<double>(train.size()));
  std::vector<std::vector<double>> out(data.embeddings.size(), std::vector<double>(dim));
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      out[i][j] = sd[j] > 1e-12 ? (data.embeddings[i][j] - mean[j]) / sd[j] : 0.0;
    }
  }
  return out;
}

}  // namespace detail

// Fits the full feature pipeline and one classifier on `train`, then
// predicts `test`. `stream` separates the seeds of different folds.
inline std::vector<int> fit_predict(const ClassifyDataset& data, ClassifierKind kind,
                                    FeatureSetting setting, std::span<const std::size_t> train,
                                    std::span<const std::size_t> test,
                                    const ClassifySuiteConfig& cfg, std::uint64_t stream) {
  if (!data.embeddings.empty() && data.embeddings.size() != data.records.size()) {
    throw ValidationError("embedding count differs from record count");
  }
  std::vector<std::string> train_docs;
  for (auto i : train) train_docs.push_back(data.records[i].text);
  const auto tfidf = TfidfVectorizer::fit(train_docs, cfg.max_text_features);
  const std::size_t T = tfidf.size();
  std::vector<std::vector<double>> cues;
  if (setting == FeatureSetting::TextAndCues) cues = detail::fold_cues(data, train, cfg);
  const std::size_t C = setting == FeatureSetting::TextAndCues ? cfg.cues.size() : 0;
  std::vector<int> y_train;
  for (auto i : train) y_train.push_back(static_cast<int>(data.records[i].label));
  const std::uint64_t seed = derive_seed(cfg.seed, stream);

  auto sparse_row = [&](std::size_t i, const std::vector<std::vector<double>>& emb) {
    const auto text = tfidf.transform(data.records[i].text);
    return fuse_features(text, T, C ? std::span<const double>(cues[i]) : std::span<const double>{},
                         emb.empty() ? std::span<const double>{} : std::span<const double>(emb[i]));
  };

  if (kind == ClassifierKind::Fusion) {
    const auto emb = detail::fold_embeddings(data, train);
    const std::size_t E = emb.empty() ? 0 : emb.front().size();
    std::vector<SparseVector> Xtr;
    for (auto i : train) Xtr.push_back(sparse_row(i, emb));
    const auto model = train_fusion(Xtr, y_train, T + C + E, kNumStates, cfg.fusion);
    std::vector<int> pred;
    for (auto i : test) pred.push_back(model.predict(sparse_row(i, emb)));
    return pred;
  }

  auto dense = [&](std::span<const std::size_t> rows) {
    FeatureMatrix X(rows.size(), T + C);
    const std::vector<std::vector<double>> no_emb;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& [j, v] : sparse_row(rows[r], no_emb)) X.at(r, j) = v;
    }
    return X;
  };
  const auto Xtr = dense(train);
  const auto Xte = dense(test);
  if (kind == ClassifierKind::Forest) {
    auto fc = cfg.forest;
    fc.seed = seed;
    return train_forest(Xtr, y_train, kNumStates, fc).predict(Xte);
  }
  auto bc = cfg.boosted;
  bc.seed = seed;
  return train_boosted(Xtr, y_train, kNumStates, bc).predict(Xte);
}

struct ClassifierRun {
  ClassifierKind kind = ClassifierKind::Forest;
  FeatureSetting setting = FeatureSetting::TextOnly;
  EvaluationReport holdout;
  CvResult cv;
};

// 7:3-style stratified holdout plus stratified k-fold CV for one classifier
// and feature setting.
inline ClassifierRun run_classifier(const ClassifyDataset& data, ClassifierKind kind,
                                    FeatureSetting setting, const ClassifySuiteConfig& cfg,
                                    double split_ratio, std::size_t folds) {
  const auto y = data.labels();
  ClassifierRun run;
  run.kind = kind;
  run.setting = setting;
  const auto split = stratified_split(y, split_ratio, cfg.seed);
  const auto pred = fit_predict(data, kind, setting, split.train, split.test, cfg, 0);
  std::vector<int> gold;
  for (auto i : split.test) gold.push_back(y[i]);
  run.holdout = evaluate(pred, gold);
  std::uint64_t fold_stream = 1;
  run.cv = kfold_cv(y, folds, derive_seed(cfg.seed, 1000),
                    [&](std::span<const std::size_t> tr, std::span<const std::size_t> te) {
                      return fit_predict(data, kind, setting, tr, te, cfg, fold_stream++);
                    });
  return run;
}

// Embedding exchange: a header line {"dimension": D} followed by records
// {"dialogue_id", "utterance_id", "embedding": [D floats]}.
inline std::map<RecordKey, std::vector<double>> import_embeddings(
    std::string_view text, const std::string& source = "<embeddings>") {
  const auto lines = lines_of(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw ParseError(source, 1, "missing dimension header");
  std::size_t dim = 0;
  try {
    dim = nlohmann::json::parse(lines[i]).at("dimension").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, i + 1, std::string("bad dimension header: ") + e.what());
  }
  if (dim == 0) throw ValidationError(source + ": embedding dimension must be positive");
  std::map<RecordKey, std::vector<double>> out;
  for (++i; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    RecordKey key;
    std::vector<double> emb;
    try {
      const auto j = nlohmann::json::parse(lines[i]);
      key = {j.at("dialogue_id").get<std::string>(), j.at("utterance_id").get<std::string>()};
      emb = j.at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, i + 1, e.what());
    }
    if (emb.size() != dim) {
      throw ValidationError(source + ":" + std::to_string(i + 1) + ": embedding has " +
                            std::to_string(emb.size()) + " values, header declares " +
                            std::to_string(dim));
    }
    for (double v : emb) {
      if (!std::isfinite(v)) {
        throw ValidationError(source + ":" + std::to_string(i + 1) + ": non-finite value");
      }
    }
    out[key] = std::move(emb);
  }
  return out;
}

// Mean of the available utterance embeddings over every window utterance;
// zeros when none is available.
inline std::vector<double> window_embedding(const ContextWindow& w,
                                            const std::map<RecordKey, std::vector<double>>& emb,
                                            std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  std::size_t n = 0;
  for (const Utterance* u : w.utterances()) {
    auto it = emb.find({u->dialogue_id, u->id});
    if (it == emb.end()) continue;
    for (std::size_t j = 0; j < dim; ++j) out[j] += it->second[j];
    ++n;
  }
  if (n) {
    for (auto& v : out) v /= static_cast<double>(n);
  }
  return out;
}

}  // namespace cueload
