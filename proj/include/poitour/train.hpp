#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "poitour/corpus.hpp"
#include "poitour/error.hpp"
#include "poitour/model.hpp"
#include "poitour/objective.hpp"
#include "poitour/random.hpp"

namespace poitour {

struct TrainOptions {
  /// 1 runs a single sequential update stream (bitwise reproducible). More
  /// threads train sentence shards concurrently with unsynchronized updates.
  int threads = 1;
  /// Called with (epoch, epoch-averaged loss) for each epoch, 1-based.
  std::function<void(int, double)> on_epoch;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Runs SGD over sentences for one update stream.
class SgdWorker {
 public:
  SgdWorker(EmbeddingModel& model, const NegativeSampler& sampler, Rng& rng,
            std::uint64_t total_work, std::atomic<std::uint64_t>& processed)
      : model_(model),
        hp_(model.hyperparams()),
        sampler_(sampler),
        rng_(rng),
        total_work_(static_cast<double>(total_work)),
        processed_(processed),
        hidden_(model.dim()),
        grad_(model.dim()),
        scratch_(model.dim()) {}

  struct EpochLoss {
    double sum = 0;
    std::uint64_t terms = 0;
  };

  void train_sentence(std::span<const std::int32_t> s, EpochLoss& loss) {
    if (s.size() < 2) return;
    if (is_cbow(hp_.model_kind)) {
      train_cbow(s, loss);
    } else {
      train_skipgram(s, loss);
    }
    if (diverged_) {
      throw TrainingError("non-finite parameter during training (learning rate " +
                          std::to_string(hp_.learning_rate_initial) + " too high?)");
    }
  }

 private:
  float next_learning_rate() {
    const auto done = processed_.fetch_add(1, std::memory_order_relaxed);
    const double frac = std::min(1.0, static_cast<double>(done) / total_work_);
    return static_cast<float>(hp_.learning_rate_initial * (1.0 - frac));
  }

  /// Input vector of vocabulary token i: its row, or the mean of its row and
  /// n-gram rows for subword models.
  void compose(std::int32_t i, std::span<float> out) const {
    const auto idx = static_cast<std::size_t>(i);
    const auto row = model_.input_row(idx);
    std::copy(row.begin(), row.end(), out.begin());
    if (!model_.has_subwords()) return;
    const auto buckets = model_.subword_buckets(idx);
    for (auto b : buckets) {
      const auto g = model_.ngram_row(b);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += g[k];
    }
    const float inv = 1.0f / static_cast<float>(buckets.size() + 1);
    for (auto& x : out) x *= inv;
  }

  /// Adds scale * grad to every component of token i's input vector,
  /// divided among components for subword models.
  void apply_input(std::int32_t i, std::span<const float> grad, float scale) {
    const auto idx = static_cast<std::size_t>(i);
    if (model_.has_subwords()) scale /= static_cast<float>(model_.subword_buckets(idx).size() + 1);
    axpy(model_.input_row(idx), grad, scale);
    if (!model_.has_subwords()) return;
    for (auto b : model_.subword_buckets(idx)) axpy(model_.ngram_row(b), grad, scale);
  }

  void axpy(std::span<float> y, std::span<const float> x, float a) {
    bool ok = true;
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k] += a * x[k];
      ok &= std::isfinite(y[k]);
    }
    if (!ok) diverged_ = true;
  }

  /// Positive target plus negatives against hidden_; accumulates grad_ and
  /// updates output rows. Returns the loss.
  double score_targets(std::int32_t positive, float lr) {
    std::fill(grad_.begin(), grad_.end(), 0.0f);
    const std::span<const float> hidden(hidden_);
    float coeff = 0;
    double loss = objective::logistic_term<float>(hidden, model_.output_row(positive), true, grad_, coeff);
    axpy(model_.output_row(positive), hidden, -lr * coeff);
    for (int k = 0; k < hp_.negative_samples; ++k) {
      const std::int32_t neg = sampler_(rng_);
      if (neg == positive) continue;
      loss += objective::logistic_term<float>(hidden, model_.output_row(neg), false, grad_, coeff);
      axpy(model_.output_row(neg), hidden, -lr * coeff);
    }
    if (!std::isfinite(loss)) diverged_ = true;
    return loss;
  }

  void train_skipgram(std::span<const std::int32_t> s, EpochLoss& loss) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const float lr = next_learning_rate();
      const auto b = static_cast<std::size_t>(draw_window(hp_.window, &rng_));
      const std::size_t lo = i >= b ? i - b : 0;
      const std::size_t hi = std::min(s.size() - 1, i + b);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        compose(s[i], hidden_);
        loss.sum += score_targets(s[j], lr);
        ++loss.terms;
        apply_input(s[i], grad_, -lr);
      }
    }
  }

  void train_cbow(std::span<const std::int32_t> s, EpochLoss& loss) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const float lr = next_learning_rate();
      const auto b = static_cast<std::size_t>(draw_window(hp_.window, &rng_));
      const std::size_t lo = i >= b ? i - b : 0;
      const std::size_t hi = std::min(s.size() - 1, i + b);
      std::fill(hidden_.begin(), hidden_.end(), 0.0f);
      std::size_t n_ctx = 0;
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        compose(s[j], scratch_);
        for (std::size_t k = 0; k < hidden_.size(); ++k) hidden_[k] += scratch_[k];
        ++n_ctx;
      }
      const float inv = 1.0f / static_cast<float>(n_ctx);
      for (auto& x : hidden_) x *= inv;
      loss.sum += score_targets(s[i], lr);
      ++loss.terms;
      for (std::size_t j = lo; j <= hi; ++j)
        if (j != i) apply_input(s[j], grad_, -lr * inv);
    }
  }

  EmbeddingModel& model_;
  const HyperParams& hp_;
  const NegativeSampler& sampler_;
  Rng& rng_;
  double total_work_;
  std::atomic<std::uint64_t>& processed_;
  std::vector<float> hidden_;
  std::vector<float> grad_;
  std::vector<float> scratch_;
  bool diverged_ = false;
};

inline void initialize(EmbeddingModel& model, Rng& rng) {
  const double half = 0.5 / static_cast<double>(model.dim());
  for (auto& x : model.input_data()) x = static_cast<float>(rng.uniform(-half, half));
  for (auto& x : model.ngram_data()) x = static_cast<float>(rng.uniform(-half, half));
}

}  // namespace detail

/// Trains POI embeddings with negative sampling under the configured objective.
inline EmbeddingModel train(const Corpus& corpus, const HyperParams& hp, const TrainOptions& options = {}) {
  hp.validate();
  if (options.threads < 1) throw ConfigError("thread count must be positive");
  EmbeddingModel model(build_vocab(corpus, hp.min_count), hp);

  std::vector<std::vector<std::int32_t>> sentences;
  std::uint64_t tokens = 0;
  for (const auto& s : corpus.sentences) {
    auto enc = encode(s, model.vocabulary());
    if (enc.size() < 2) continue;
    tokens += enc.size();
    sentences.push_back(std::move(enc));
  }
  if (sentences.empty()) throw DataError("no sentence has two in-vocabulary tokens");

  const NegativeSampler sampler(model.vocabulary().counts());
  const std::uint64_t total_work = tokens * static_cast<std::uint64_t>(hp.epochs);
  std::atomic<std::uint64_t> processed{0};
  Rng rng(hp.seed);
  detail::initialize(model, rng);

  std::vector<double> history;
  using EpochLoss = detail::SgdWorker::EpochLoss;
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(options.threads), sentences.size());

  if (threads <= 1) {
    detail::SgdWorker worker(model, sampler, rng, total_work, processed);
    for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
      EpochLoss loss;
      for (const auto& s : sentences) worker.train_sentence(s, loss);
      const double avg = loss.sum / static_cast<double>(std::max<std::uint64_t>(loss.terms, 1));
      history.push_back(avg);
      if (options.on_epoch) options.on_epoch(epoch, avg);
    }
  } else {
    std::vector<std::vector<EpochLoss>> losses(threads, std::vector<EpochLoss>(hp.epochs));
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t per = (sentences.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          Rng local(detail::splitmix64(hp.seed ^ (t + 1)));
          detail::SgdWorker worker(model, sampler, local, total_work, processed);
          const std::size_t begin = t * per;
          const std::size_t end = std::min(sentences.size(), begin + per);
          for (int epoch = 0; epoch < hp.epochs; ++epoch)
            for (std::size_t i = begin; i < end; ++i) worker.train_sentence(sentences[i], losses[t][epoch]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
      EpochLoss total;
      for (const auto& per_thread : losses) {
        total.sum += per_thread[epoch].sum;
        total.terms += per_thread[epoch].terms;
      }
      const double avg = total.sum / static_cast<double>(std::max<std::uint64_t>(total.terms, 1));
      history.push_back(avg);
      if (options.on_epoch) options.on_epoch(epoch + 1, avg);
    }
  }
  model.set_loss_history(std::move(history));
  return model;
}

}  // namespace poitour
