#pragma once

// Negative-sampling objective kernels shared by the trainer and the gradient
// checks. Templated on the scalar so the checks can run in double while the
// trainer runs in float.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace poitour::objective {

/// log(1 + exp(x)) without overflow.
template <class Real>
Real softplus(Real x) noexcept {
  using std::exp;
  using std::log1p;
  return x > Real(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <class Real>
Real sigmoid(Real x) noexcept {
  using std::exp;
  if (x >= Real(0)) return Real(1) / (Real(1) + exp(-x));
  const Real e = exp(x);
  return e / (Real(1) + e);
}

template <class Real>
Real dot(std::span<const Real> a, std::span<const Real> b) noexcept {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// One logistic term: -log σ(u·h) for a true target, -log σ(-u·h) for noise.
/// Adds dL/dh to `grad_hidden` and stores the scalar c with dL/du = c·h.
/// Returns the loss of the term.
template <class Real>
Real logistic_term(std::span<const Real> hidden, std::span<const Real> target, bool positive,
                   std::span<Real> grad_hidden, Real& coeff) noexcept {
  const Real x = dot(hidden, target);
  const Real label = positive ? Real(1) : Real(0);
  coeff = sigmoid(x) - label;
  for (std::size_t i = 0; i < hidden.size(); ++i) grad_hidden[i] += coeff * target[i];
  return positive ? softplus(-x) : softplus(x);
}

/// Mean of several equally sized vectors.
template <class Real>
void mean_into(std::span<const std::span<const Real>> parts, std::span<Real> out) noexcept {
  for (auto& x : out) x = 0;
  for (const auto& p : parts)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
  const Real inv = Real(1) / static_cast<Real>(parts.size());
  for (auto& x : out) x *= inv;
}

template <class Real>
struct Target {
  std::span<const Real> vector;
  bool positive = false;
};

template <class Real>
struct NsGradient {
  Real loss = 0;
  std::vector<Real> hidden;                // dL/dh
  std::vector<std::vector<Real>> targets;  // dL/du per target
};

/// Full negative-sampling loss for one hidden vector against a positive target
/// and noise targets, with gradients w.r.t. every argument.
template <class Real>
NsGradient<Real> negative_sampling(std::span<const Real> hidden, std::span<const Target<Real>> targets) {
  NsGradient<Real> g;
  g.hidden.assign(hidden.size(), Real(0));
  for (const auto& t : targets) {
    Real c = 0;
    g.loss += logistic_term<Real>(hidden, t.vector, t.positive, g.hidden, c);
    std::vector<Real> gu(hidden.size());
    for (std::size_t i = 0; i < hidden.size(); ++i) gu[i] = c * hidden[i];
    g.targets.push_back(std::move(gu));
  }
  return g;
}

template <class Real>
struct CbowGradient {
  Real loss = 0;
  std::vector<std::vector<Real>> contexts;  // dL/d(context input vector)
  std::vector<std::vector<Real>> targets;
};

/// CBOW: the hidden vector is the mean of the context vectors, so each context
/// receives dL/dh divided by the number of contexts.
template <class Real>
CbowGradient<Real> cbow_negative_sampling(std::span<const std::span<const Real>> contexts,
                                          std::span<const Target<Real>> targets) {
  const std::size_t dim = contexts.front().size();
  std::vector<Real> hidden(dim);
  mean_into<Real>(contexts, hidden);
  auto ns = negative_sampling<Real>(hidden, targets);
  CbowGradient<Real> g;
  g.loss = ns.loss;
  g.targets = std::move(ns.targets);
  const Real inv = Real(1) / static_cast<Real>(contexts.size());
  for (std::size_t c = 0; c < contexts.size(); ++c) {
    std::vector<Real> gc(dim);
    for (std::size_t i = 0; i < dim; ++i) gc[i] = ns.hidden[i] * inv;
    g.contexts.push_back(std::move(gc));
  }
  return g;
}

}  // namespace poitour::objective
