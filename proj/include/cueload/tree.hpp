#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "cueload/error.hpp"
#include "cueload/rng.hpp"

namespace cueload {

// Column-major dense feature matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  // Builds from row vectors; all rows must share one length.
  static FeatureMatrix from_rows(std::span<const std::vector<double>> rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    FeatureMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw ValidationError("feature rows differ in length");
      for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  double at(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
  std::span<const double> column(std::size_t c) const {
    return {data_.data() + c * rows_, rows_};
  }
  std::vector<double> row(std::size_t r) const {
    std::vector<double> out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) out[c] = at(r, c);
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // class distribution or regression output
};

// Binary tree; x[feature] <= threshold goes left.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }

  const std::vector<double>& predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
      const auto& n = nodes_[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                         : n.right);
    }
    return nodes_[i].value;
  }

  const std::vector<double>& predict_row(const FeatureMatrix& X, std::size_t row) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
      const auto& n = nodes_[i];
      const double v = X.at(row, static_cast<std::size_t>(n.feature));
      i = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
    }
    return nodes_[i].value;
  }

  std::size_t depth() const { return depth_from(0); }

 private:
  std::size_t depth_from(std::size_t i) const {
    if (nodes_[i].feature < 0) return 1;
    return 1 + std::max(depth_from(static_cast<std::size_t>(nodes_[i].left)),
                        depth_from(static_cast<std::size_t>(nodes_[i].right)));
  }

  std::vector<TreeNode> nodes_;
};

// Gini criterion over integer class labels.
struct GiniCriterion {
  std::span<const int> labels;
  std::size_t n_classes;

  struct Stats {
    std::vector<double> w;
    double total = 0.0;
  };
  Stats empty() const { return {std::vector<double>(n_classes, 0.0), 0.0}; }
  void add(Stats& s, std::size_t row, double weight) const {
    s.w[static_cast<std::size_t>(labels[row])] += weight;
    s.total += weight;
  }
  void remove(Stats& s, std::size_t row, double weight) const {
    s.w[static_cast<std::size_t>(labels[row])] -= weight;
    s.total -= weight;
  }
  // Negated weighted Gini impurity, up to a constant: sum c^2 / W.
  double score(const Stats& s) const {
    if (s.total <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : s.w) sq += c * c;
    return sq / s.total;
  }
  bool pure(const Stats& s) const {
    return std::count_if(s.w.begin(), s.w.end(), [](double c) { return c > 0.0; }) <= 1;
  }
  std::vector<double> leaf(const Stats& s) const {
    std::vector<double> p(n_classes, 0.0);
    for (std::size_t k = 0; k < n_classes; ++k) p[k] = s.w[k] / s.total;
    return p;
  }
};

// Least-squares criterion over real targets (boosting residuals).
struct SquaredErrorCriterion {
  std::span<const double> target;

  struct Stats {
    double sum = 0.0;
    double total = 0.0;
  };
  Stats empty() const { return {}; }
  void add(Stats& s, std::size_t row, double weight) const {
    s.sum += weight * target[row];
    s.total += weight;
  }
  void remove(Stats& s, std::size_t row, double weight) const {
    s.sum -= weight * target[row];
    s.total -= weight;
  }
  double score(const Stats& s) const { return s.total > 0.0 ? s.sum * s.sum / s.total : 0.0; }
  bool pure(const Stats&) const { return false; }
  std::vector<double> leaf(const Stats& s) const {
    return {s.total > 0.0 ? s.sum / s.total : 0.0};
  }
};

struct TreeConfig {
  int max_depth = 16;
  double min_leaf = 1.0;         // minimum sample weight in each child
  std::size_t max_features = 0;  // candidate features per split; 0 = all
};

// Presorted row order per feature, shared by every tree grown on one matrix.
class SortedColumns {
 public:
  explicit SortedColumns(const FeatureMatrix& X) : order_(X.cols()) {
    for (std::size_t c = 0; c < X.cols(); ++c) {
      auto& o = order_[c];
      o.resize(X.rows());
      std::iota(o.begin(), o.end(), 0u);
      const auto col = X.column(c);
      std::stable_sort(o.begin(), o.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
  }
  std::span<const std::uint32_t> order(std::size_t c) const { return order_[c]; }

 private:
  std::vector<std::vector<std::uint32_t>> order_;
};

// Greedy CART growth. Rows enter with weights (bootstrap multiplicities);
// rows of weight 0 are ignored. `Criterion` supplies the impurity and leaf
// values. `on_leaf`, when provided, may replace a leaf's value from its rows.
template <class Criterion>
class TreeBuilder {
 public:
  using LeafHook = std::function<std::vector<double>(std::span<const std::uint32_t>)>;

  TreeBuilder(const FeatureMatrix& X, const SortedColumns& sorted, Criterion criterion,
              TreeConfig config)
      : X_(X), sorted_(sorted), crit_(std::move(criterion)), config_(config) {}

  DecisionTree build(std::span<const double> weights, Rng& rng, LeafHook on_leaf = {}) {
    weights_ = weights;
    on_leaf_ = std::move(on_leaf);
    mark_.assign(X_.rows(), 0);
    nodes_.clear();
    std::vector<std::uint32_t> rows;
    for (std::uint32_t i = 0; i < X_.rows(); ++i) {
      if (weights[i] > 0.0) rows.push_back(i);
    }
    if (rows.empty()) throw ValidationError("cannot grow a tree without samples");
    grow(rows, 0, rng);
    return DecisionTree(std::move(nodes_));
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  int grow(const std::vector<std::uint32_t>& rows, int depth, Rng& rng) {
    auto stats = crit_.empty();
    for (auto r : rows) crit_.add(stats, r, weights_[r]);
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    Split best;
    if (depth < config_.max_depth && stats.total >= 2.0 * config_.min_leaf &&
        !crit_.pure(stats)) {
      best = find_split(rows, stats, rng);
    }
    if (best.feature < 0) {
      nodes_[static_cast<std::size_t>(id)].value = on_leaf_ ? on_leaf_(rows) : crit_.leaf(stats);
      return id;
    }
    std::vector<std::uint32_t> left, right;
    for (auto r : rows) {
      (X_.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right)
          .push_back(r);
    }
    const int l = grow(left, depth + 1, rng);
    const int rr = grow(right, depth + 1, rng);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = rr;
    return id;
  }

  std::vector<std::size_t> candidate_features(Rng& rng) const {
    std::vector<std::size_t> f(X_.cols());
    std::iota(f.begin(), f.end(), 0);
    const std::size_t m = config_.max_features;
    if (m == 0 || m >= f.size()) return f;
    for (std::size_t i = 0; i < m; ++i) std::swap(f[i], f[i + rng.index(f.size() - i)]);
    f.resize(m);
    std::sort(f.begin(), f.end());
    return f;
  }

  Split find_split(const std::vector<std::uint32_t>& rows,
                   const typename Criterion::Stats& parent, Rng& rng) {
    Split best;
    const double parent_score = crit_.score(parent);
    const auto features = candidate_features(rng);
    const std::size_t n_total = X_.rows();
    const double n_node = static_cast<double>(rows.size());
    const bool filter = n_node * std::log2(n_node + 1.0) * 2.0 > static_cast<double>(n_total);
    if (filter) {
      for (auto r : rows) mark_[r] = 1;
    }
    std::vector<std::uint32_t> order;
    order.reserve(rows.size());
    for (std::size_t f : features) {
      const auto col = X_.column(f);
      order.clear();
      if (filter) {
        for (auto r : sorted_.order(f)) {
          if (mark_[r]) order.push_back(r);
        }
      } else {
        order.assign(rows.begin(), rows.end());
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
      }
      if (col[order.front()] == col[order.back()]) continue;
      auto left = crit_.empty();
      auto right = parent;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto r = order[i];
        crit_.add(left, r, weights_[r]);
        crit_.remove(right, r, weights_[r]);
        const double v = col[r];
        const double next = col[order[i + 1]];
        if (v == next) continue;
        if (left.total < config_.min_leaf || right.total < config_.min_leaf) continue;
        const double gain = crit_.score(left) + crit_.score(right) - parent_score;
        if (gain > best.gain + 1e-12) {
          double mid = 0.5 * (v + next);
          if (!(mid < next)) mid = v;
          best = {static_cast<int>(f), mid, gain};
        }
      }
    }
    if (filter) {
      for (auto r : rows) mark_[r] = 0;
    }
    return best;
  }

  const FeatureMatrix& X_;
  const SortedColumns& sorted_;
  Criterion crit_;
  TreeConfig config_;
  std::span<const double> weights_;
  LeafHook on_leaf_;
  std::vector<char> mark_;
  std::vector<TreeNode> nodes_;
};

// Index of the largest entry; ties go to the smallest index.
inline std::size_t argmax_first(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace cueload
