#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cueload/corpus.hpp"

namespace cueload {

namespace detail {

inline bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

}  // namespace detail

// Lowercases ASCII and the Latin-1 letters (so German umlauts fold too),
// then strips leading and trailing ASCII punctuation. Inner hyphens and
// apostrophes survive. May return an empty string for pure punctuation.
inline std::string normalize_token(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  for (std::size_t i = 0; i < surface.size(); ++i) {
    const auto c = static_cast<unsigned char>(surface[i]);
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c + 32));
    } else if (c == 0xC3 && i + 1 < surface.size()) {
      auto d = static_cast<unsigned char>(surface[i + 1]);
      // U+00C0..U+00DE except U+00D7 (multiplication sign)
      if (d >= 0x80 && d <= 0x9E && d != 0x97) d = static_cast<unsigned char>(d + 0x20);
      out.push_back(static_cast<char>(c));
      out.push_back(static_cast<char>(d));
      ++i;
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  std::size_t b = 0, e = out.size();
  while (b < e && detail::is_ascii_punct(static_cast<unsigned char>(out[b]))) ++b;
  while (e > b && detail::is_ascii_punct(static_cast<unsigned char>(out[e - 1]))) --e;
  return out.substr(b, e - b);
}

// Whitespace-split surfaces, normalized, with empty results dropped. This is
// the token sequence scored by the word model and expected in imported
// log-probability records.
inline std::vector<std::string> normalized_tokens(const Utterance& u) {
  std::vector<std::string> out;
  for (const auto& t : u.tokens) {
    std::size_t start = 0;
    const std::string_view s = t.surface;
    while (start < s.size()) {
      const auto b = s.find_first_not_of(" \t", start);
      if (b == std::string_view::npos) break;
      auto e = s.find_first_of(" \t", b);
      if (e == std::string_view::npos) e = s.size();
      auto norm = normalize_token(s.substr(b, e - b));
      if (!norm.empty()) out.push_back(std::move(norm));
      start = e;
    }
  }
  return out;
}

}  // namespace cueload
