#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cueload/error.hpp"

namespace cueload {

// Average ranks (1-based); tied values share the mean of their positions.
inline std::vector<double> rank_with_ties(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
    i = j;
  }
  return ranks;
}

// Sum over tie groups of t^3 - t.
inline double tie_sum(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    total += t * t * t - t;
    i = j;
  }
  return total;
}

// Regularized upper incomplete gamma Q(a, x): series for x < a + 1,
// modified Lentz continued fraction otherwise.
inline double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  constexpr double eps = 1e-16;
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * eps) break;
    }
    return std::max(0.0, 1.0 - sum * std::exp(log_prefactor));
  }
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) break;
  }
  return std::exp(log_prefactor) * h;
}

// Upper tail of the chi-squared distribution.
inline double chi2_sf(double x, double df) {
  if (!(df >= 1.0)) throw UsageError("chi2_sf requires df >= 1");
  if (x <= 0.0) return 1.0;
  return std::clamp(gamma_q(0.5 * df, 0.5 * x), 0.0, 1.0);
}

// Two-sided standard normal tail probability.
inline double normal_two_sided_p(double z) {
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

// Effect size (H - k + 1) / (n - k); negative whenever H < k - 1.
inline double eta_squared(double h, std::size_t k, std::size_t n) {
  return (h - static_cast<double>(k) + 1.0) / (static_cast<double>(n) - static_cast<double>(k));
}

struct KruskalResult {
  std::string cue;
  double h = 0.0;
  double p = 1.0;
  double eta_squared = 0.0;
  int df = 0;
  std::vector<std::size_t> group_sizes;
};

namespace detail {

struct PooledRanks {
  std::vector<double> ranks;            // pooled, group-major order
  std::vector<std::size_t> offsets;     // group g occupies [offsets[g], offsets[g+1])
  double n = 0.0;
  double ties = 0.0;
};

inline PooledRanks pool_and_rank(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw DegenerateDataError("need at least two groups");
  PooledRanks pr;
  std::vector<double> pooled;
  pr.offsets.push_back(0);
  for (const auto& g : groups) {
    if (g.empty()) throw DegenerateDataError("a group is empty");
    pooled.insert(pooled.end(), g.begin(), g.end());
    pr.offsets.push_back(pooled.size());
  }
  if (pooled.size() < groups.size() + 1) {
    throw DegenerateDataError("need at least k + 1 observations");
  }
  for (double v : pooled) {
    if (!std::isfinite(v)) throw DegenerateDataError("non-finite observation");
  }
  pr.n = static_cast<double>(pooled.size());
  pr.ties = tie_sum(pooled);
  if (pr.ties >= pr.n * pr.n * pr.n - pr.n) {
    throw DegenerateDataError("all observations are identical");
  }
  pr.ranks = rank_with_ties(pooled);
  return pr;
}

}  // namespace detail

// Tie-corrected Kruskal-Wallis H with chi-squared p-value (k - 1 df) and
// eta^2 = (H - k + 1) / (n - k), which goes negative when H < k - 1.
inline KruskalResult kruskal_wallis(std::span<const std::vector<double>> groups,
                                    std::string cue = {}) {
  const auto pr = detail::pool_and_rank(groups);
  const double n = pr.n;
  double sum = 0.0;
  KruskalResult r;
  r.cue = std::move(cue);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double rank_sum = 0.0;
    for (std::size_t i = pr.offsets[g]; i < pr.offsets[g + 1]; ++i) rank_sum += pr.ranks[i];
    const double ng = static_cast<double>(groups[g].size());
    const double dev = rank_sum / ng - (n + 1.0) / 2.0;
    sum += ng * dev * dev;
    r.group_sizes.push_back(groups[g].size());
  }
  // Deviation form; the textbook sum-of-squares form loses digits to cancellation.
  const double h_raw = 12.0 * sum / (n * (n + 1.0));
  const double correction = 1.0 - pr.ties / (n * n * n - n);
  r.h = std::max(0.0, h_raw / correction);
  r.df = static_cast<int>(groups.size()) - 1;
  r.p = chi2_sf(r.h, r.df);
  r.eta_squared = eta_squared(r.h, groups.size(), static_cast<std::size_t>(n));
  return r;
}

struct DunnResult {
  std::string cue;
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  double z = 0.0;
  double p_raw = 1.0;
  double p_adj = 1.0;
};

// Dunn's pairwise rank-mean comparisons, tie corrected, two-sided, with a
// Bonferroni factor of k(k-1)/2. Pairs come out in (0,1), (0,2), ... order.
inline std::vector<DunnResult> dunn_posthoc(std::span<const std::vector<double>> groups,
                                            const std::string& cue = {}) {
  const auto pr = detail::pool_and_rank(groups);
  const double n = pr.n;
  const std::size_t k = groups.size();
  std::vector<double> mean_rank(k);
  for (std::size_t g = 0; g < k; ++g) {
    double s = 0.0;
    for (std::size_t i = pr.offsets[g]; i < pr.offsets[g + 1]; ++i) s += pr.ranks[i];
    mean_rank[g] = s / static_cast<double>(groups[g].size());
  }
  const double base = n * (n + 1.0) / 12.0 - pr.ties / (12.0 * (n - 1.0));
  const double m = static_cast<double>(k * (k - 1) / 2);
  std::vector<DunnResult> out;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      DunnResult d;
      d.cue = cue;
      d.group_a = a;
      d.group_b = b;
      const double se = std::sqrt(base * (1.0 / static_cast<double>(groups[a].size()) +
                                          1.0 / static_cast<double>(groups[b].size())));
      d.z = (mean_rank[a] - mean_rank[b]) / se;
      d.p_raw = normal_two_sided_p(d.z);
      d.p_adj = std::min(1.0, m * d.p_raw);
      out.push_back(d);
    }
  }
  return out;
}

// Linear-interpolation quantile of sorted data (the "type 7" definition).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw UndefinedValueError("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Everything needed to draw one box: quartiles, 1.5 IQR whiskers clipped to
// the data, and the points beyond them.
struct BoxSummary {
  std::size_t n = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double whisker_low = 0.0, whisker_high = 0.0;
  std::vector<double> outliers;
};

inline BoxSummary box_summary(std::span<const double> values) {
  if (values.empty()) throw UndefinedValueError("box summary of empty data");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  BoxSummary b;
  b.n = s.size();
  b.min = s.front();
  b.max = s.back();
  b.q1 = quantile_sorted(s, 0.25);
  b.median = quantile_sorted(s, 0.5);
  b.q3 = quantile_sorted(s, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.max;
  b.whisker_high = b.min;
  for (double v : s) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      b.whisker_low = std::min(b.whisker_low, v);
      b.whisker_high = std::max(b.whisker_high, v);
    }
  }
  return b;
}

}  // namespace cueload
