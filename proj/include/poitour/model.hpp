#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poitour/corpus.hpp"
#include "poitour/error.hpp"
#include "poitour/subword.hpp"

namespace poitour {

inline constexpr std::uint64_t kDefaultSeed = 20220101;

enum class ModelKind { skipgram, cbow, fasttext_skipgram, fasttext_cbow };

inline constexpr bool uses_subwords(ModelKind k) noexcept {
  return k == ModelKind::fasttext_skipgram || k == ModelKind::fasttext_cbow;
}
inline constexpr bool is_cbow(ModelKind k) noexcept {
  return k == ModelKind::cbow || k == ModelKind::fasttext_cbow;
}

inline std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::skipgram: return "skipgram";
    case ModelKind::cbow: return "cbow";
    case ModelKind::fasttext_skipgram: return "fasttext_skipgram";
    case ModelKind::fasttext_cbow: return "fasttext_cbow";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::skipgram, ModelKind::cbow, ModelKind::fasttext_skipgram,
                 ModelKind::fasttext_cbow}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown model kind: " + std::string(s));
}

struct HyperParams {
  ModelKind model_kind = ModelKind::skipgram;
  int dim = 32;
  int window = 3;
  int epochs = 50;
  double learning_rate_initial = 0.025;
  int negative_samples = 5;
  int min_count = 1;
  int ngram_min = 3;
  int ngram_max = 6;
  std::uint64_t bucket_count = 2'000'000;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (dim <= 0) throw ConfigError("dim must be positive");
    if (window <= 0) throw ConfigError("window must be positive");
    if (epochs <= 0) throw ConfigError("epochs must be positive");
    if (!(learning_rate_initial > 0.0) || !std::isfinite(learning_rate_initial))
      throw ConfigError("learning rate must be positive");
    if (negative_samples <= 0) throw ConfigError("negative sample count must be positive");
    if (min_count <= 0) throw ConfigError("min_count must be positive");
    if (uses_subwords(model_kind)) {
      if (ngram_min < 3 || ngram_min > ngram_max)
        throw ConfigError("n-gram range must satisfy 3 <= ngram_min <= ngram_max");
      if (bucket_count == 0) throw ConfigError("bucket count must be positive");
    }
  }
};

/// Cosine similarity clamped to [-1, 1]; 0 when either vector is zero.
template <class Real>
double cosine(std::span<const Real> a, std::span<const Real> b) {
  if (a.size() != b.size()) {
    throw ConfigError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return cosine<double>(std::span<const double>(a), std::span<const double>(b));
}

/// Trained (or loaded) POI embeddings. Rows are stored in float.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;

  EmbeddingModel(Vocabulary vocab, HyperParams hp) : vocab_(std::move(vocab)), hp_(hp) {
    hp_.validate();
    const auto d = static_cast<std::size_t>(hp_.dim);
    input_.assign(vocab_.size() * d, 0.0f);
    output_.assign(vocab_.size() * d, 0.0f);
    if (uses_subwords(hp_.model_kind)) {
      ngrams_.assign(static_cast<std::size_t>(hp_.bucket_count) * d, 0.0f);
      subwords_.reserve(vocab_.size());
      for (const auto& tok : vocab_.tokens()) subwords_.push_back(buckets_for(tok));
    }
  }

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const HyperParams& hyperparams() const noexcept { return hp_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(hp_.dim); }
  bool has_subwords() const noexcept { return uses_subwords(hp_.model_kind); }

  std::span<float> input_row(std::size_t i) noexcept { return {input_.data() + i * dim(), dim()}; }
  std::span<const float> input_row(std::size_t i) const noexcept {
    return {input_.data() + i * dim(), dim()};
  }
  std::span<float> output_row(std::size_t i) noexcept { return {output_.data() + i * dim(), dim()}; }
  std::span<const float> output_row(std::size_t i) const noexcept {
    return {output_.data() + i * dim(), dim()};
  }
  std::span<float> ngram_row(std::uint64_t b) noexcept {
    return {ngrams_.data() + static_cast<std::size_t>(b) * dim(), dim()};
  }
  std::span<const float> ngram_row(std::uint64_t b) const noexcept {
    return {ngrams_.data() + static_cast<std::size_t>(b) * dim(), dim()};
  }

  /// Bucket indices of every n-gram of vocabulary token i (subword models only).
  std::span<const std::uint64_t> subword_buckets(std::size_t i) const { return subwords_.at(i); }

  std::vector<std::uint64_t> buckets_for(std::string_view token) const {
    std::vector<std::uint64_t> out;
    for (const auto& g : extract_ngrams(token, hp_.ngram_min, hp_.ngram_max))
      out.push_back(hash_ngram(g, hp_.bucket_count));
    return out;
  }

  std::span<float> input_data() noexcept { return input_; }
  std::span<const float> input_data() const noexcept { return input_; }
  std::span<float> output_data() noexcept { return output_; }
  std::span<const float> output_data() const noexcept { return output_; }
  std::span<float> ngram_data() noexcept { return ngrams_; }
  std::span<const float> ngram_data() const noexcept { return ngrams_; }

  /// Epoch-averaged training loss, one entry per epoch (empty for loaded models).
  const std::vector<double>& loss_history() const noexcept { return loss_history_; }
  void set_loss_history(std::vector<double> h) { loss_history_ = std::move(h); }

  /// Token vector, or nullopt when the token is unknown to a non-subword model.
  std::optional<std::vector<double>> try_vector(std::string_view token) const {
    std::vector<double> out(dim(), 0.0);
    const auto idx = vocab_.index_of(token);
    if (!has_subwords()) {
      if (!idx) return std::nullopt;
      const auto row = input_row(static_cast<std::size_t>(*idx));
      std::copy(row.begin(), row.end(), out.begin());
      return out;
    }
    std::size_t n = 0;
    auto add = [&](std::span<const float> row) {
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k];
      ++n;
    };
    if (idx) {
      add(input_row(static_cast<std::size_t>(*idx)));
      for (auto b : subword_buckets(static_cast<std::size_t>(*idx))) add(ngram_row(b));
    } else {
      for (auto b : buckets_for(token)) add(ngram_row(b));
    }
    for (auto& x : out) x /= static_cast<double>(n);
    return out;
  }

  std::vector<double> vector(std::string_view token) const {
    if (auto v = try_vector(token)) return std::move(*v);
    throw LookupError("token not in vocabulary: " + std::string(token));
  }

 private:
  Vocabulary vocab_;
  HyperParams hp_;
  std::vector<float> input_;
  std::vector<float> output_;
  std::vector<float> ngrams_;
  std::vector<std::vector<std::uint64_t>> subwords_;
  std::vector<double> loss_history_;
};

}  // namespace poitour
