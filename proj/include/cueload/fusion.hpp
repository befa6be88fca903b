#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "cueload/error.hpp"
#include "cueload/tfidf.hpp"

namespace cueload {

struct FusionConfig {
  double learning_rate = 0.5;
  int max_epochs = 3000;
  double tolerance = 1e-6;  // stop once the loss decreases by less than this
  double l2 = 1e-4;
  bool class_weights = false;  // inverse class frequency in the loss
};

// Concatenates text features, cue values and an optional dense embedding into
// one sparse row: [text | cues | embedding].
inline SparseVector fuse_features(const SparseVector& text, std::size_t text_dim,
                                  std::span<const double> cues,
                                  std::span<const double> embedding = {}) {
  SparseVector out = text;
  auto offset = static_cast<std::uint32_t>(text_dim);
  for (double v : cues) {
    if (v != 0.0) out.emplace_back(offset, v);
    ++offset;
  }
  for (double v : embedding) {
    if (v != 0.0) out.emplace_back(offset, v);
    ++offset;
  }
  return out;
}

// Multinomial logistic regression trained by full-batch gradient descent on
// mean cross-entropy plus an L2 penalty on the weights.
class FusionModel {
 public:
  FusionModel(std::size_t dim, std::size_t n_classes)
      : dim_(dim), n_classes_(n_classes), weights_(dim * n_classes, 0.0), bias_(n_classes, 0.0) {}

  static FusionModel train(std::span<const SparseVector> X, std::span<const int> labels,
                           std::size_t dim, std::size_t n_classes, const FusionConfig& config) {
    if (X.size() != labels.size()) throw ValidationError("label count differs from row count");
    if (X.empty()) throw ValidationError("empty training set");
    for (const auto& row : X) {
      if (!row.empty() && row.back().first >= dim) {
        throw ValidationError("feature index exceeds model dimension");
      }
    }
    const std::size_t K = n_classes;
    const double n = static_cast<double>(X.size());
    std::vector<double> sample_weight(X.size(), 1.0);
    if (config.class_weights) {
      std::vector<double> counts(K, 0.0);
      for (int y : labels) counts[static_cast<std::size_t>(y)] += 1.0;
      double present = 0.0;
      for (double c : counts) present += c > 0.0 ? 1.0 : 0.0;
      for (std::size_t i = 0; i < X.size(); ++i) {
        sample_weight[i] = n / (present * counts[static_cast<std::size_t>(labels[i])]);
      }
    }

    FusionModel m(dim, K);
    std::vector<double> grad_w(dim * K), grad_b(K), p(K);
    double prev_loss = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      double loss = 0.0;
      for (std::size_t i = 0; i < X.size(); ++i) {
        m.probabilities(X[i], p);
        const auto y = static_cast<std::size_t>(labels[i]);
        const double sw = sample_weight[i];
        loss -= sw * std::log(std::max(p[y], 1e-300));
        for (std::size_t k = 0; k < K; ++k) {
          const double g = sw * (p[k] - (k == y ? 1.0 : 0.0));
          grad_b[k] += g;
          for (const auto& [j, v] : X[i]) grad_w[j * K + k] += g * v;
        }
      }
      loss /= n;
      double penalty = 0.0;
      for (double w : m.weights_) penalty += w * w;
      loss += 0.5 * config.l2 * penalty;
      if (prev_loss - loss < config.tolerance) break;
      prev_loss = loss;
      for (std::size_t j = 0; j < m.weights_.size(); ++j) {
        m.weights_[j] -= config.learning_rate * (grad_w[j] / n + config.l2 * m.weights_[j]);
      }
      for (std::size_t k = 0; k < K; ++k) m.bias_[k] -= config.learning_rate * grad_b[k] / n;
      ++m.epochs_;
    }
    return m;
  }

  std::size_t dim() const { return dim_; }
  std::size_t n_classes() const { return n_classes_; }
  int epochs() const { return epochs_; }
  const std::vector<double>& weights() const { return weights_; }  // [feature * K + class]
  const std::vector<double>& bias() const { return bias_; }

  void probabilities(const SparseVector& x, std::span<double> p) const {
    const std::size_t K = n_classes_;
    for (std::size_t k = 0; k < K; ++k) p[k] = bias_[k];
    for (const auto& [j, v] : x) {
      if (j >= dim_) throw ValidationError("feature index exceeds model dimension");
      for (std::size_t k = 0; k < K; ++k) p[k] += weights_[j * K + k] * v;
    }
    double mx = p[0];
    for (std::size_t k = 1; k < K; ++k) mx = std::max(mx, p[k]);
    double z = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      p[k] = std::exp(p[k] - mx);
      z += p[k];
    }
    for (std::size_t k = 0; k < K; ++k) p[k] /= z;
  }

  std::vector<double> predict_proba(const SparseVector& x) const {
    std::vector<double> p(n_classes_);
    probabilities(x, p);
    return p;
  }

  int predict(const SparseVector& x) const {
    const auto p = predict_proba(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      if (p[k] > p[best]) best = k;
    }
    return static_cast<int>(best);
  }

 private:
  std::size_t dim_;
  std::size_t n_classes_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  int epochs_ = 0;
};

inline FusionModel train_fusion(std::span<const SparseVector> X, std::span<const int> labels,
                                std::size_t dim, std::size_t n_classes,
                                const FusionConfig& config) {
  return FusionModel::train(X, labels, dim, n_classes, config);
}

}  // namespace cueload
