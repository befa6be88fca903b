#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "cueload/error.hpp"
#include "cueload/rng.hpp"
#include "cueload/tree.hpp"

namespace cueload {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 16;
  double min_leaf = 1.0;
  std::uint64_t seed = 0;
};

inline void check_training_labels(std::span<const int> labels, std::size_t n_rows,
                                  std::size_t n_classes) {
  if (labels.size() != n_rows) throw ValidationError("label count differs from row count");
  std::set<int> present;
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes) {
      throw ValidationError("class label out of range");
    }
    present.insert(y);
  }
  if (present.size() < 2) throw ValidationError("training set contains a single class");
}

// Bagged Gini CART trees with sqrt(F) candidate features per split. Each tree
// draws its bootstrap and feature subsets from its own derived seed.
class ForestModel {
 public:
  static ForestModel train(const FeatureMatrix& X, std::span<const int> labels,
                           std::size_t n_classes, const ForestConfig& config) {
    if (config.n_trees < 1 || config.max_depth < 1 || config.min_leaf <= 0.0) {
      throw UsageError("forest config values must be positive");
    }
    check_training_labels(labels, X.rows(), n_classes);
    ForestModel model;
    model.n_classes_ = n_classes;
    const SortedColumns sorted(X);
    TreeConfig tc;
    tc.max_depth = config.max_depth;
    tc.min_leaf = config.min_leaf;
    tc.max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(X.cols())))));
    TreeBuilder<GiniCriterion> builder(X, sorted, GiniCriterion{labels, n_classes}, tc);
    std::vector<double> weights(X.rows());
    for (int t = 0; t < config.n_trees; ++t) {
      const std::uint64_t tree_seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
      Rng rng(tree_seed);
      std::fill(weights.begin(), weights.end(), 0.0);
      for (std::size_t i = 0; i < X.rows(); ++i) weights[rng.index(X.rows())] += 1.0;
      model.trees_.push_back(builder.build(weights, rng));
      model.seeds_.push_back(tree_seed);
    }
    return model;
  }

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<std::uint64_t>& tree_seeds() const { return seeds_; }
  std::size_t n_classes() const { return n_classes_; }

  // Hard majority vote; each tree votes its leaf's most probable class.
  std::vector<double> votes(std::span<const double> x) const {
    std::vector<double> v(n_classes_, 0.0);
    for (const auto& t : trees_) v[argmax_first(t.predict(x))] += 1.0;
    return v;
  }

  int predict(std::span<const double> x) const {
    return static_cast<int>(argmax_first(votes(x)));
  }

  std::vector<int> predict(const FeatureMatrix& X) const {
    std::vector<int> out;
    out.reserve(X.rows());
    std::vector<double> v(n_classes_);
    for (std::size_t r = 0; r < X.rows(); ++r) {
      std::fill(v.begin(), v.end(), 0.0);
      for (const auto& t : trees_) v[argmax_first(t.predict_row(X, r))] += 1.0;
      out.push_back(static_cast<int>(argmax_first(v)));
    }
    return out;
  }

  // Used by tests to check vote commutativity.
  ForestModel with_tree_order(std::span<const std::size_t> order) const {
    ForestModel m;
    m.n_classes_ = n_classes_;
    for (auto i : order) {
      m.trees_.push_back(trees_[i]);
      m.seeds_.push_back(seeds_[i]);
    }
    return m;
  }

 private:
  std::size_t n_classes_ = 0;
  std::vector<DecisionTree> trees_;
  std::vector<std::uint64_t> seeds_;
};

inline ForestModel train_forest(const FeatureMatrix& X, std::span<const int> labels,
                                std::size_t n_classes, const ForestConfig& config) {
  return ForestModel::train(X, labels, n_classes, config);
}

}  // namespace cueload
