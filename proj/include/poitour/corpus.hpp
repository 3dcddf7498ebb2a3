#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poitour/error.hpp"
#include "poitour/ingest.hpp"
#include "poitour/random.hpp"

namespace poitour {

using Sentence = std::vector<std::string>;

struct Corpus {
  std::vector<Sentence> sentences;
  std::size_t n_users = 0;

  std::size_t token_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
};

/// One sentence per trajectory with at least two visits. `token_of` maps a
/// poi_id to its embedding token; visits it cannot map are skipped.
inline Corpus build_corpus(std::span<const Trajectory> trajectories,
                           const std::function<std::optional<std::string>(const std::string&)>& token_of) {
  Corpus corpus;
  std::set<std::string> users;
  for (const auto& t : trajectories) {
    if (t.visits.size() < 2) continue;
    Sentence s;
    s.reserve(t.visits.size());
    for (const auto& v : t.visits) {
      if (auto tok = token_of(v.poi_id)) s.push_back(std::move(*tok));
    }
    if (s.size() < 2) continue;
    corpus.sentences.push_back(std::move(s));
    users.insert(t.user_id);
  }
  if (corpus.sentences.empty()) throw DataError("empty corpus: no trajectory with at least 2 visits");
  corpus.n_users = users.size();
  return corpus;
}

inline Corpus build_corpus(std::span<const Trajectory> trajectories, const PoiTable& table) {
  return build_corpus(trajectories, [&](const std::string& id) -> std::optional<std::string> {
    if (const Poi* p = table.find(id)) return p->name;
    return std::nullopt;
  });
}

/// Token <-> dense index, ordered by descending frequency then lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Builds from (token, count) pairs already in index order.
  static Vocabulary from_ordered(std::vector<std::pair<std::string, std::int64_t>> entries) {
    Vocabulary v;
    for (auto& [tok, count] : entries) {
      auto [it, inserted] = v.index_.emplace(tok, static_cast<std::int32_t>(v.tokens_.size()));
      if (!inserted) throw ConfigError("duplicate vocabulary token: " + tok);
      v.tokens_.push_back(std::move(tok));
      v.counts_.push_back(count);
    }
    return v;
  }

  std::optional<std::int32_t> index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view token) const { return index_of(token).has_value(); }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  std::int64_t count(std::size_t i) const { return counts_.at(i); }
  std::span<const std::string> tokens() const noexcept { return tokens_; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, std::int32_t> index_;
};

inline Vocabulary build_vocab(const Corpus& corpus, std::int64_t min_count) {
  if (corpus.sentences.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::int64_t> freq;
  for (const auto& s : corpus.sentences)
    for (const auto& tok : s) ++freq[tok];
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [tok, n] : freq)
    if (n >= min_count) kept.emplace_back(tok, n);
  if (kept.empty()) throw DataError("vocabulary empty after min_count filtering");
  // map iteration is lexicographic, so a stable sort on count keeps the tie-break
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return Vocabulary::from_ordered(std::move(kept));
}

/// Sentence mapped to vocabulary indices with out-of-vocabulary tokens removed.
inline std::vector<std::int32_t> encode(const Sentence& sentence, const Vocabulary& vocab) {
  std::vector<std::int32_t> out;
  out.reserve(sentence.size());
  for (const auto& tok : sentence)
    if (auto i = vocab.index_of(tok)) out.push_back(*i);
  return out;
}

struct TrainingPair {
  std::int32_t center;
  std::int32_t context;
  friend auto operator<=>(const TrainingPair&, const TrainingPair&) = default;
};

/// Effective half-window for one center position: uniform in [1, window]
/// when an rng is supplied, otherwise `window`.
inline int draw_window(int window, Rng* rng) {
  if (window < 1) throw ConfigError("window must be positive");
  return rng ? 1 + static_cast<int>(rng->below(static_cast<std::uint64_t>(window))) : window;
}

/// Calls fn(center_pos, context_pos) for each skip-gram pair in position order.
template <class Fn>
void for_each_context(std::size_t length, int window, Rng* rng, Fn&& fn) {
  for (std::size_t i = 0; i < length; ++i) {
    const auto b = static_cast<std::size_t>(draw_window(window, rng));
    const std::size_t lo = i >= b ? i - b : 0;
    const std::size_t hi = std::min(length - 1, i + b);
    for (std::size_t j = lo; j <= hi; ++j)
      if (j != i) fn(i, j);
  }
}

inline std::vector<TrainingPair> generate_training_pairs(std::span<const std::int32_t> sentence,
                                                         int window, Rng* rng = nullptr) {
  std::vector<TrainingPair> pairs;
  for_each_context(sentence.size(), window, rng,
                   [&](std::size_t i, std::size_t j) { pairs.push_back({sentence[i], sentence[j]}); });
  return pairs;
}

/// Draws token indices from the unigram distribution raised to `power`.
class NegativeSampler {
 public:
  NegativeSampler() = default;
  NegativeSampler(std::span<const std::int64_t> counts, double power = 0.75) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (auto c : counts) {
      total += std::pow(static_cast<double>(c), power);
      cumulative_.push_back(total);
    }
    if (!(total > 0.0)) throw ConfigError("negative sampler needs positive counts");
    for (auto& c : cumulative_) c /= total;
    cumulative_.back() = 1.0;
  }

  std::int32_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::int32_t>(it - cumulative_.begin());
  }

  /// Probability of drawing index i.
  double probability(std::size_t i) const {
    return i == 0 ? cumulative_[0] : cumulative_[i] - cumulative_[i - 1];
  }
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace poitour
