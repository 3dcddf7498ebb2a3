#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace poitour {

/// Character n-grams of `<token>` with lengths in [ngram_min, ngram_max], in
/// position order (then by length), followed by the whole wrapped token.
/// Lengths are counted in bytes.
inline std::vector<std::string> extract_ngrams(std::string_view token, int ngram_min, int ngram_max) {
  const std::string wrapped = "<" + std::string(token) + ">";
  std::vector<std::string> out;
  const std::size_t len = wrapped.size();
  for (std::size_t start = 0; start < len; ++start) {
    for (int n = ngram_min; n <= ngram_max; ++n) {
      const auto un = static_cast<std::size_t>(n);
      if (start + un > len) break;
      if (un == len) continue;  // the whole token is appended once below
      out.push_back(wrapped.substr(start, un));
    }
  }
  out.push_back(wrapped);
  return out;
}

/// 64-bit FNV-1a over the raw bytes.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t hash_ngram(std::string_view subword, std::uint64_t bucket_count) noexcept {
  return fnv1a64(subword) % bucket_count;
}

}  // namespace poitour
