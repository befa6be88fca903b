#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cueload/corpus.hpp"
#include "cueload/error.hpp"
#include "cueload/rng.hpp"

namespace cueload {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // False when the metric had a zero denominator and was reported as 0.
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;
};

using ConfusionMatrix = std::array<std::array<std::size_t, kNumStates>, kNumStates>;

struct EvaluationReport {
  std::array<ClassMetrics, kNumStates> per_class{};
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t total = 0;
  ConfusionMatrix confusion{};  // rows = gold, columns = predicted
};

// Macro-F1 averages over the classes that occur in gold or predictions.
inline EvaluationReport evaluate(std::span<const int> predictions, std::span<const int> gold) {
  if (predictions.size() != gold.size()) {
    throw ValidationError("prediction and gold lengths differ");
  }
  EvaluationReport r;
  r.total = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= static_cast<int>(kNumStates) || predictions[i] < 0 ||
        predictions[i] >= static_cast<int>(kNumStates)) {
      throw ValidationError("label outside the four understanding states");
    }
    ++r.confusion[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(predictions[i])];
  }
  std::size_t correct = 0;
  double f1_sum = 0.0;
  std::size_t f1_classes = 0;
  for (std::size_t k = 0; k < kNumStates; ++k) {
    std::size_t tp = r.confusion[k][k], row = 0, col = 0;
    for (std::size_t j = 0; j < kNumStates; ++j) {
      row += r.confusion[k][j];
      col += r.confusion[j][k];
    }
    correct += tp;
    auto& m = r.per_class[k];
    m.support = row;
    m.precision_defined = col > 0;
    m.recall_defined = row > 0;
    m.precision = col ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    m.recall = row ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    m.f1_defined = m.precision + m.recall > 0.0;
    m.f1 = m.f1_defined ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    if (row > 0 || col > 0) {
      f1_sum += m.f1;
      ++f1_classes;
    }
  }
  r.accuracy = r.total ? static_cast<double>(correct) / static_cast<double>(r.total) : 0.0;
  r.macro_f1 = f1_classes ? f1_sum / static_cast<double>(f1_classes) : 0.0;
  return r;
}

inline std::map<int, std::vector<std::size_t>> rows_by_class(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> by;
  for (std::size_t i = 0; i < labels.size(); ++i) by[labels[i]].push_back(i);
  return by;
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class shuffle, then a largest-remainder allocation of round(ratio * n)
// training rows across classes, so each class is within one record of its
// exact share. Both index lists come back sorted.
inline Split stratified_split(std::span<const int> labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw UsageError("split ratio must lie strictly between 0 and 1");
  }
  auto by = rows_by_class(labels);
  for (const auto& [cls, rows] : by) {
    if (rows.size() < 2) throw ValidationError("a class has fewer than 2 records");
  }
  const auto total_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(labels.size())));
  std::vector<std::size_t> quota;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  std::size_t ci = 0;
  for (const auto& [cls, rows] : by) {
    const double exact = ratio * static_cast<double>(rows.size());
    const auto q = static_cast<std::size_t>(std::floor(exact));
    quota.push_back(q);
    assigned += q;
    remainders.emplace_back(exact - static_cast<double>(q), ci++);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total_train && i < remainders.size(); ++i, ++assigned) {
    ++quota[remainders[i].second];
  }
  Rng rng(seed);
  Split s;
  ci = 0;
  for (auto& [cls, rows] : by) {
    rng.shuffle(std::span(rows));
    const std::size_t q = std::clamp<std::size_t>(quota[ci++], 1, rows.size() - 1);
    s.train.insert(s.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(q));
    s.test.insert(s.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(q), rows.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

// Validation folds: rows of each class are shuffled and dealt round-robin,
// continuing the deal where the previous class stopped so fold sizes differ
// by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                              std::size_t k,
                                                              std::uint64_t seed) {
  if (k < 2) throw UsageError("need at least 2 folds");
  auto by = rows_by_class(labels);
  for (const auto& [cls, rows] : by) {
    if (rows.size() < k) {
      throw ValidationError("class " + std::to_string(cls) + " has fewer records than folds");
    }
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (auto& [cls, rows] : by) {
    rng.shuffle(std::span(rows));
    for (auto r : rows) {
      folds[next].push_back(r);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
};

inline MeanSd mean_sd(std::span<const double> xs) {
  MeanSd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

struct CvResult {
  std::vector<double> fold_accuracy;
  std::vector<double> fold_macro_f1;
  MeanSd accuracy;
  MeanSd macro_f1;
  ConfusionMatrix pooled_confusion{};
};

// Predicts labels for `test` after training on `train` (row indices).
using FoldTrainer = std::function<std::vector<int>(std::span<const std::size_t> train,
                                                   std::span<const std::size_t> test)>;

inline CvResult kfold_cv(std::span<const int> labels, std::size_t k, std::uint64_t seed,
                         const FoldTrainer& trainer) {
  const auto folds = stratified_folds(labels, k, seed);
  CvResult cv;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train.begin(), train.end());
    const auto& test = folds[f];
    const auto pred = trainer(train, test);
    std::vector<int> gold;
    gold.reserve(test.size());
    for (auto i : test) gold.push_back(labels[i]);
    const auto rep = evaluate(pred, gold);
    cv.fold_accuracy.push_back(rep.accuracy);
    cv.fold_macro_f1.push_back(rep.macro_f1);
    for (std::size_t a = 0; a < kNumStates; ++a) {
      for (std::size_t b = 0; b < kNumStates; ++b) cv.pooled_confusion[a][b] += rep.confusion[a][b];
    }
  }
  cv.accuracy = mean_sd(cv.fold_accuracy);
  cv.macro_f1 = mean_sd(cv.fold_macro_f1);
  return cv;
}

}  // namespace cueload
