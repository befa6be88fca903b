#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "cueload/error.hpp"
#include "cueload/forest.hpp"
#include "cueload/rng.hpp"
#include "cueload/tree.hpp"

namespace cueload {

struct BoostedConfig {
  int n_rounds = 50;
  int depth = 3;
  double learning_rate = 0.1;
  double subsample = 1.0;  // row fraction drawn per round, without replacement
  std::uint64_t seed = 0;
};

// Multiclass gradient boosting on the softmax cross-entropy: per round and
// class, a least-squares regression tree is fitted to the residual
// y_k - p_k and its leaves take the one-step Newton value
//   (K - 1) / K * sum(r) / sum(|r| (1 - |r|)).
// Scores start from the log class prior (add-one smoothed).
class BoostedModel {
 public:
  static BoostedModel train(const FeatureMatrix& X, std::span<const int> labels,
                            std::size_t n_classes, const BoostedConfig& config) {
    if (config.n_rounds < 0 || config.depth < 1 || config.learning_rate < 0.0 ||
        !(config.subsample > 0.0 && config.subsample <= 1.0)) {
      throw UsageError("boosted config out of range");
    }
    check_training_labels(labels, X.rows(), n_classes);
    const std::size_t n = X.rows();
    const std::size_t K = n_classes;
    BoostedModel model;
    model.n_classes_ = K;
    model.learning_rate_ = config.learning_rate;
    std::vector<double> counts(K, 0.0);
    for (int y : labels) counts[static_cast<std::size_t>(y)] += 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      model.init_.push_back(std::log((counts[k] + 1.0) / (static_cast<double>(n) + K)));
    }
    if (config.learning_rate == 0.0) return model;

    const SortedColumns sorted(X);
    TreeConfig tc;
    tc.max_depth = config.depth;
    tc.min_leaf = 1.0;
    std::vector<double> scores(n * K);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < K; ++k) scores[i * K + k] = model.init_[k];
    }
    std::vector<double> prob(n * K), residual(n), weights(n);
    const double kfactor = static_cast<double>(K - 1) / static_cast<double>(K);
    Rng rng(config.seed);
    for (int round = 0; round < config.n_rounds; ++round) {
      for (std::size_t i = 0; i < n; ++i) {
        softmax(std::span(scores).subspan(i * K, K), std::span(prob).subspan(i * K, K));
      }
      std::fill(weights.begin(), weights.end(), 0.0);
      if (config.subsample < 1.0) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        rng.shuffle(std::span(idx));
        const auto m = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::round(config.subsample * static_cast<double>(n))));
        for (std::size_t i = 0; i < m; ++i) weights[idx[i]] = 1.0;
      } else {
        std::fill(weights.begin(), weights.end(), 1.0);
      }
      std::vector<DecisionTree> stage;
      for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          residual[i] = (labels[i] == static_cast<int>(k) ? 1.0 : 0.0) - prob[i * K + k];
        }
        TreeBuilder<SquaredErrorCriterion> builder(X, sorted, SquaredErrorCriterion{residual},
                                                   tc);
        auto newton = [&](std::span<const std::uint32_t> rows) {
          double num = 0.0, den = 0.0;
          for (auto r : rows) {
            const double a = std::fabs(residual[r]);
            num += residual[r];
            den += a * (1.0 - a);
          }
          return std::vector<double>{den < 1e-12 ? 0.0 : kfactor * num / den};
        };
        auto tree = builder.build(weights, rng, newton);
        for (std::size_t i = 0; i < n; ++i) {
          scores[i * K + k] += config.learning_rate * tree.predict_row(X, i)[0];
        }
        stage.push_back(std::move(tree));
      }
      model.stages_.push_back(std::move(stage));
    }
    return model;
  }

  std::size_t n_classes() const { return n_classes_; }
  const std::vector<std::vector<DecisionTree>>& stages() const { return stages_; }

  std::vector<double> scores(std::span<const double> x) const {
    std::vector<double> s = init_;
    for (const auto& stage : stages_) {
      for (std::size_t k = 0; k < n_classes_; ++k) {
        s[k] += learning_rate_ * stage[k].predict(x)[0];
      }
    }
    return s;
  }

  std::vector<double> predict_proba(std::span<const double> x) const {
    auto s = scores(x);
    std::vector<double> p(s.size());
    softmax(s, p);
    return p;
  }

  int predict(std::span<const double> x) const {
    return static_cast<int>(argmax_first(scores(x)));
  }

  std::vector<int> predict(const FeatureMatrix& X) const {
    std::vector<int> out;
    out.reserve(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) {
      std::vector<double> s = init_;
      for (const auto& stage : stages_) {
        for (std::size_t k = 0; k < n_classes_; ++k) {
          s[k] += learning_rate_ * stage[k].predict_row(X, r)[0];
        }
      }
      out.push_back(static_cast<int>(argmax_first(s)));
    }
    return out;
  }

  static void softmax(std::span<const double> s, std::span<double> p) {
    double mx = s[0];
    for (double v : s) mx = std::max(mx, v);
    double z = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      p[k] = std::exp(s[k] - mx);
      z += p[k];
    }
    for (auto& v : p) v /= z;
  }

 private:
  std::size_t n_classes_ = 0;
  double learning_rate_ = 0.0;
  std::vector<double> init_;
  std::vector<std::vector<DecisionTree>> stages_;
};

inline BoostedModel train_boosted(const FeatureMatrix& X, std::span<const int> labels,
                                  std::size_t n_classes, const BoostedConfig& config) {
  return BoostedModel::train(X, labels, n_classes, config);
}

}  // namespace cueload
