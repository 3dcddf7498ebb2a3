#pragma once

// Central finite-difference checks of the negative-sampling objectives.

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "poitour/objective.hpp"

namespace poitour::testing {

using Vec = std::vector<double>;

inline double relative_error(const Vec& analytic, const Vec& numeric) {
  double diff = 0, na = 0, nn = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double denom = std::max(std::sqrt(na) + std::sqrt(nn), 1e-8);
  return std::sqrt(diff) / denom;
}

/// Parameters of one random check: `blocks` vectors of length `dim`.
struct Point {
  std::vector<Vec> blocks;
  std::vector<bool> positive;  // per target
};

inline Vec random_vec(std::mt19937_64& gen, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(dim);
  for (auto& x : v) x = u(gen);
  return v;
}

template <class LossFn>
Vec numeric_gradient(std::vector<Vec>& blocks, std::size_t b, LossFn&& loss, double h) {
  Vec g(blocks[b].size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double keep = blocks[b][i];
    blocks[b][i] = keep + h;
    const double up = loss(blocks);
    blocks[b][i] = keep - h;
    const double down = loss(blocks);
    blocks[b][i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline std::vector<objective::Target<double>> make_targets(const std::vector<Vec>& blocks, std::size_t first,
                                                           std::size_t count) {
  std::vector<objective::Target<double>> t;
  for (std::size_t i = 0; i < count; ++i) t.push_back({std::span<const double>(blocks[first + i]), i == 0});
  return t;
}

/// Worst relative error of skip-gram (hidden = one input vector) gradients
/// over `points` random draws.
inline double sgns_gradient_error(int points, double h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  double worst = 0;
  for (int p = 0; p < points; ++p) {
    const std::size_t dim = 1 + gen() % 8;
    const std::size_t targets = 2 + gen() % 5;  // positive + negatives
    std::vector<Vec> blocks;
    for (std::size_t i = 0; i < 1 + targets; ++i) blocks.push_back(random_vec(gen, dim));
    auto loss = [&](const std::vector<Vec>& b) {
      return objective::negative_sampling<double>(b[0], make_targets(b, 1, targets)).loss;
    };
    const auto g = objective::negative_sampling<double>(blocks[0], make_targets(blocks, 1, targets));
    worst = std::max(worst, relative_error(g.hidden, numeric_gradient(blocks, 0, loss, h)));
    for (std::size_t t = 0; t < targets; ++t)
      worst = std::max(worst, relative_error(g.targets[t], numeric_gradient(blocks, 1 + t, loss, h)));
  }
  return worst;
}

/// Same for CBOW: hidden is the mean of 1-4 context vectors.
inline double cbow_gradient_error(int points, double h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  double worst = 0;
  for (int p = 0; p < points; ++p) {
    const std::size_t dim = 1 + gen() % 8;
    const std::size_t contexts = 1 + gen() % 4;
    const std::size_t targets = 2 + gen() % 5;
    std::vector<Vec> blocks;
    for (std::size_t i = 0; i < contexts + targets; ++i) blocks.push_back(random_vec(gen, dim));
    auto ctx_spans = [&](const std::vector<Vec>& b) {
      std::vector<std::span<const double>> s;
      for (std::size_t i = 0; i < contexts; ++i) s.emplace_back(b[i]);
      return s;
    };
    auto loss = [&](const std::vector<Vec>& b) {
      const auto s = ctx_spans(b);
      return objective::cbow_negative_sampling<double>(s, make_targets(b, contexts, targets)).loss;
    };
    const auto s = ctx_spans(blocks);
    const auto g = objective::cbow_negative_sampling<double>(s, make_targets(blocks, contexts, targets));
    for (std::size_t c = 0; c < contexts; ++c)
      worst = std::max(worst, relative_error(g.contexts[c], numeric_gradient(blocks, c, loss, h)));
    for (std::size_t t = 0; t < targets; ++t)
      worst = std::max(worst, relative_error(g.targets[t], numeric_gradient(blocks, contexts + t, loss, h)));
  }
  return worst;
}

}  // namespace poitour::testing
