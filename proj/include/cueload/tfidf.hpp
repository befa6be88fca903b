#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cueload/error.hpp"
#include "cueload/text.hpp"

namespace cueload {

// (index, value) pairs with strictly increasing indices.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

inline std::vector<std::string> tfidf_tokenize(std::string_view doc) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < doc.size()) {
    const auto b = doc.find_first_not_of(" \t\r\n", start);
    if (b == std::string_view::npos) break;
    auto e = doc.find_first_of(" \t\r\n", b);
    if (e == std::string_view::npos) e = doc.size();
    auto term = normalize_token(doc.substr(b, e - b));
    if (!term.empty()) out.push_back(std::move(term));
    start = e;
  }
  return out;
}

// Unigram TF-IDF with smoothed idf, ln((1 + n) / (1 + df)) + 1, raw term
// counts and L2-normalized rows. The vocabulary keeps the `max_features`
// terms of highest document frequency (ties: lexicographic) and is indexed in
// lexicographic order.
class TfidfVectorizer {
 public:
  static TfidfVectorizer fit(std::span<const std::string> documents,
                             std::size_t max_features = 1000) {
    std::map<std::string, std::size_t> df;
    for (const auto& doc : documents) {
      auto terms = tfidf_tokenize(doc);
      std::sort(terms.begin(), terms.end());
      terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
      for (auto& t : terms) ++df[std::move(t)];
    }
    if (df.empty()) throw ValidationError("TF-IDF fit corpus has no terms");
    std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (max_features > 0 && ranked.size() > max_features) ranked.resize(max_features);
    std::sort(ranked.begin(), ranked.end());

    TfidfVectorizer v;
    const double n = static_cast<double>(documents.size());
    for (const auto& [term, count] : ranked) {
      v.index_.emplace(term, static_cast<std::uint32_t>(v.terms_.size()));
      v.terms_.push_back(term);
      v.df_.push_back(count);
      v.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return v;
  }

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  const std::vector<std::size_t>& document_frequency() const { return df_; }

  SparseVector transform(std::string_view doc) const {
    std::map<std::uint32_t, double> tf;
    for (const auto& term : tfidf_tokenize(doc)) {
      if (auto it = index_.find(term); it != index_.end()) tf[it->second] += 1.0;
    }
    SparseVector out;
    double norm2 = 0.0;
    for (const auto& [idx, count] : tf) {
      const double w = count * idf_[idx];
      out.emplace_back(idx, w);
      norm2 += w * w;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& e : out) e.second *= inv;
    }
    return out;
  }

  std::vector<SparseVector> transform(std::span<const std::string> docs) const {
    std::vector<SparseVector> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(transform(d));
    return out;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
};

inline std::vector<SparseVector> tfidf_fit_transform(std::span<const std::string> documents,
                                                     std::size_t max_features = 1000) {
  return TfidfVectorizer::fit(documents, max_features).transform(documents);
}

}  // namespace cueload
