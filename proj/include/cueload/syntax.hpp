#pragma once

#include <algorithm>
#include <optional>
#include <cstdlib>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cueload/corpus.hpp"
#include "cueload/error.hpp"

namespace cueload {

struct Arc {
  int head = 0;
  int dependent = 0;

  bool operator==(const Arc&) const = default;
};

struct TreeStats {
  int length = 0;  // L: tokens
  int heads = 0;   // alpha: distinct tokens heading at least one arc
  int depth = 0;   // beta: nodes on the longest root-to-leaf path
  std::vector<Arc> arcs;  // word-to-word arcs; the root attachment is excluded

  bool operator==(const TreeStats&) const = default;
};

inline TreeStats tree_stats(const Utterance& u) {
  if (!u.has_tree()) {
    throw MissingTreeError("utterance " + u.id + " has no dependency tree");
  }
  TreeStats s;
  const int n = static_cast<int>(u.tokens.size());
  s.length = n;
  std::vector<char> is_head(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& t : u.tokens) {
    if (*t.head != 0) {
      s.arcs.push_back({*t.head, t.position});
      is_head[static_cast<std::size_t>(*t.head)] = 1;
    }
  }
  s.heads = static_cast<int>(std::count(is_head.begin(), is_head.end(), 1));
  // Trees are validated at parse time, so walking up always reaches the root.
  std::vector<int> depth(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    std::vector<int> path;
    int node = i;
    while (node != 0 && depth[static_cast<std::size_t>(node)] == 0) {
      path.push_back(node);
      node = *u.tokens[static_cast<std::size_t>(node) - 1].head;
    }
    int d = depth[static_cast<std::size_t>(node)];
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      depth[static_cast<std::size_t>(*it)] = ++d;
    }
  }
  s.depth = *std::max_element(depth.begin(), depth.end());
  return s;
}

// SC = lambda * L / alpha + (1 - lambda) * beta, or (1 - lambda) * beta when
// the tree has no word-to-word arcs.
inline double syntactic_complexity(const TreeStats& s, double lambda = 0.5) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw UsageError("lambda must lie in [0, 1]");
  }
  const double beta_term = (1.0 - lambda) * static_cast<double>(s.depth);
  if (s.heads > 0) {
    return lambda * static_cast<double>(s.length) / static_cast<double>(s.heads) + beta_term;
  }
  return beta_term;
}

// Mean |h - d| over word-to-word arcs.
inline double average_dependency_length(std::span<const Arc> arcs) {
  if (arcs.empty()) throw UndefinedValueError("average dependency length without arcs");
  long long total = 0;
  for (const auto& a : arcs) total += std::abs(a.head - a.dependent);
  return static_cast<double>(total) / static_cast<double>(arcs.size());
}

inline double average_dependency_length(const TreeStats& s) {
  return average_dependency_length(s.arcs);
}

// Combines per-utterance stats as a forest: lengths, head counts and arcs add
// up, depth is the maximum. Arc positions stay utterance-local.
inline TreeStats combine_stats(std::span<const TreeStats> parts) {
  TreeStats out;
  for (const auto& p : parts) {
    out.length += p.length;
    out.heads += p.heads;
    out.depth = std::max(out.depth, p.depth);
    out.arcs.insert(out.arcs.end(), p.arcs.begin(), p.arcs.end());
  }
  return out;
}

struct WindowSyntax {
  TreeStats stats;
  double sc = 0.0;
  std::optional<double> adl;  // undefined when the combined forest has no arcs
  std::vector<std::string> warnings;
};

// Syntax metrics over the given utterances of a window. Utterances without a
// tree are skipped with a warning; if none has one, MissingTreeError.
inline WindowSyntax window_syntax_metrics(std::span<const Utterance* const> utterances,
                                          double lambda = 0.5) {
  WindowSyntax out;
  std::vector<TreeStats> parts;
  for (const Utterance* u : utterances) {
    if (u->empty()) continue;
    if (!u->has_tree()) {
      out.warnings.push_back("utterance " + u->id + " has no tree; skipped for syntax metrics");
      continue;
    }
    parts.push_back(tree_stats(*u));
  }
  if (parts.empty()) throw MissingTreeError("no contributing utterance has a dependency tree");
  out.stats = combine_stats(parts);
  out.sc = syntactic_complexity(out.stats, lambda);
  if (!out.stats.arcs.empty()) out.adl = average_dependency_length(out.stats);
  return out;
}

}  // namespace cueload
