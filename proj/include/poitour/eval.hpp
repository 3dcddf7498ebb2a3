#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "poitour/corpus.hpp"
#include "poitour/error.hpp"
#include "poitour/ingest.hpp"
#include "poitour/model.hpp"
#include "poitour/recommend.hpp"
#include "poitour/train.hpp"

namespace poitour {

/// Recall/precision/F1 scores of one prediction.
///
/// By default t_r divides the overlap by |S_p| and t_p divides it by |S_u|.
/// `conventional` swaps the two denominators.
struct MetricsReport {
  double t_r = 0;
  double t_p = 0;
  double f1 = 0;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline double harmonic_mean(double a, double b) noexcept { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

inline MetricsReport metrics(std::span<const std::string> actual, std::span<const std::string> predicted,
                             bool conventional = false) {
  const std::set<std::string> su(actual.begin(), actual.end());
  const std::set<std::string> sp(predicted.begin(), predicted.end());
  if (su.empty()) throw DataError("metrics undefined for an empty ground-truth set");
  std::size_t overlap = 0;
  for (const auto& p : sp) overlap += su.count(p);
  auto ratio = [&](std::size_t denom) { return denom == 0 ? 0.0 : static_cast<double>(overlap) / denom; };
  MetricsReport r;
  r.t_r = ratio(conventional ? su.size() : sp.size());
  r.t_p = ratio(conventional ? sp.size() : su.size());
  r.f1 = harmonic_mean(r.t_r, r.t_p);
  return r;
}

enum class BudgetPolicy { ground_truth, fixed };

struct HyperGrid {
  std::vector<ModelKind> model_kinds{ModelKind::skipgram};
  std::vector<int> dims{32};
  std::vector<int> windows{3};
  std::vector<int> epochs{50};

  std::size_t cells() const noexcept { return model_kinds.size() * dims.size() * windows.size() * epochs.size(); }

  /// Cells in row-major order (model kind outermost).
  std::vector<HyperParams> expand(const HyperParams& base) const {
    std::vector<HyperParams> out;
    for (auto k : model_kinds)
      for (int d : dims)
        for (int w : windows)
          for (int e : epochs) {
            HyperParams hp = base;
            hp.model_kind = k;
            hp.dim = d;
            hp.window = w;
            hp.epochs = e;
            out.push_back(hp);
          }
    return out;
  }
};

struct ExperimentConfig {
  HyperGrid grid;
  HyperParams base;  // everything the grid does not vary, including the seed
  ScoringWeights weights;
  BudgetPolicy budget_policy = BudgetPolicy::ground_truth;
  double fixed_budget = 8 * 3600.0;
  bool exclude_start = false;
  bool conventional_metrics = false;
  bool leaky = false;  // train once on every sentence instead of per fold
  int threads = 1;

  void validate() const {
    if (grid.cells() == 0) throw ConfigError("hyperparameter grid is empty");
    for (const auto& hp : grid.expand(base)) hp.validate();
    weights.validate();
    if (budget_policy == BudgetPolicy::fixed && !(fixed_budget > 0.0))
      throw ConfigError("fixed budget must be positive");
    if (threads < 1) throw ConfigError("thread count must be positive");
  }
};

/// Everything the evaluation needs for one city.
struct CityData {
  std::string city;
  PoiTable pois;
  PoiStatsMap stats;
  std::vector<Trajectory> trajectories;
};

inline constexpr std::size_t kMinEvaluableVisits = 3;

inline std::vector<std::size_t> evaluable_trajectories(std::span<const Trajectory> ts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i].visits.size() >= kMinEvaluableVisits) out.push_back(i);
  return out;
}

struct FoldResult {
  std::size_t trajectory = 0;  // index into CityData::trajectories
  MetricsReport report;
  std::vector<std::string> predicted;
  bool cold_start = false;  // start POI had no vector; prediction is the start alone
};

struct LooResult {
  std::vector<FoldResult> folds;
  MetricsReport mean;
  std::size_t cold_starts = 0;
};

namespace detail {

inline MetricsReport mean_report(std::span<const FoldResult> folds) {
  MetricsReport m;
  for (const auto& f : folds) {
    m.t_r += f.report.t_r;
    m.t_p += f.report.t_p;
    m.f1 += f.report.f1;
  }
  const auto n = static_cast<double>(std::max<std::size_t>(folds.size(), 1));
  m.t_r /= n;
  m.t_p /= n;
  m.f1 /= n;
  return m;
}

inline RecommendationRequest fold_request(const Trajectory& t, const ExperimentConfig& cfg) {
  RecommendationRequest req;
  req.start_poi_id = t.visits.front().poi_id;
  req.weights = cfg.weights;
  req.time_budget = cfg.budget_policy == BudgetPolicy::fixed ? cfg.fixed_budget
                                                             : std::max<double>(1.0, static_cast<double>(t.elapsed()));
  return req;
}

inline MetricsReport score_fold(const Trajectory& t, const std::vector<std::string>& predicted,
                                const ExperimentConfig& cfg) {
  std::vector<std::string> actual;
  for (const auto& v : t.visits) actual.push_back(v.poi_id);
  std::vector<std::string> pred = predicted;
  if (cfg.exclude_start) {
    const auto start = t.visits.front().poi_id;
    std::erase(actual, start);
    std::erase(pred, start);
    if (actual.empty()) return {};
  }
  return metrics(actual, pred, cfg.conventional_metrics);
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Leave-one-out evaluation of the embedding recommender for one hyperparameter
/// setting. Each evaluable trajectory is predicted by a model trained without
/// its own sentence (or by one shared model when `cfg.leaky`).
inline LooResult run_leave_one_out(const CityData& data, const HyperParams& hp, const ExperimentConfig& cfg) {
  const auto eval = evaluable_trajectories(data.trajectories);
  if (eval.size() < 2) {
    throw DataError("leave-one-out needs at least 2 trajectories with >= 3 visits, got " +
                    std::to_string(eval.size()));
  }
  std::optional<EmbeddingModel> shared;
  if (cfg.leaky) shared = train(build_corpus(data.trajectories, data.pois), hp);

  LooResult result;
  result.folds.resize(eval.size());
  detail::parallel_for(eval.size(), cfg.threads, [&](std::size_t f) {
    const std::size_t ti = eval[f];
    const Trajectory& t = data.trajectories[ti];
    std::optional<EmbeddingModel> own;
    if (!shared) {
      std::vector<Trajectory> rest;
      rest.reserve(data.trajectories.size() - 1);
      for (std::size_t i = 0; i < data.trajectories.size(); ++i)
        if (i != ti) rest.push_back(data.trajectories[i]);
      own = train(build_corpus(rest, data.pois), hp);
    }
    const EmbeddingModel& model = shared ? *shared : *own;
    const auto req = detail::fold_request(t, cfg);
    FoldResult fr;
    fr.trajectory = ti;
    const Poi& start = data.pois.at(req.start_poi_id);
    if (model.try_vector(start.name)) {
      fr.predicted = recommend_itinerary(req, model, data.pois, data.stats).poi_ids();
    } else {
      fr.predicted = {req.start_poi_id};
      fr.cold_start = true;
    }
    fr.report = detail::score_fold(t, fr.predicted, cfg);
    result.folds[f] = std::move(fr);
  });
  for (const auto& f : result.folds) result.cold_starts += f.cold_start;
  result.mean = detail::mean_report(result.folds);
  return result;
}

/// Same folds, popularity baseline. No training involved.
inline LooResult run_baseline(const CityData& data, const ExperimentConfig& cfg) {
  const auto eval = evaluable_trajectories(data.trajectories);
  if (eval.size() < 2) {
    throw DataError("leave-one-out needs at least 2 trajectories with >= 3 visits, got " +
                    std::to_string(eval.size()));
  }
  LooResult result;
  for (auto ti : eval) {
    const Trajectory& t = data.trajectories[ti];
    FoldResult fr;
    fr.trajectory = ti;
    fr.predicted = baseline_popularity(detail::fold_request(t, cfg), data.pois, data.stats).poi_ids();
    fr.report = detail::score_fold(t, fr.predicted, cfg);
    result.folds.push_back(std::move(fr));
  }
  result.mean = detail::mean_report(result.folds);
  return result;
}

struct ResultRow {
  std::string city;
  std::string scorer;
  std::optional<HyperParams> hyperparams;  // empty for the baseline
  MetricsReport mean;
  std::size_t n_folds = 0;
};

/// One leave-one-out run per grid cell and city, followed by the city's baseline row.
inline std::vector<ResultRow> run_sweep(std::span<const CityData> cities, const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ResultRow> rows;
  const auto cells = cfg.grid.expand(cfg.base);
  for (const auto& city : cities) {
    for (const auto& hp : cells) {
      const std::string label = "city " + city.city + ", model " + std::string(to_string(hp.model_kind)) +
                                " dim " + std::to_string(hp.dim) + " window " + std::to_string(hp.window) +
                                " epochs " + std::to_string(hp.epochs) + ": ";
      try {
        const auto loo = run_leave_one_out(city, hp, cfg);
        rows.push_back({city.city, cfg.leaky ? "embedding[leaky=true]" : "embedding", hp, loo.mean,
                        loo.folds.size()});
      } catch (const TrainingError& e) {
        throw TrainingError(label + e.what());
      } catch (const DataError& e) {
        throw DataError(label + e.what());
      } catch (const LookupError& e) {
        throw LookupError(label + e.what());
      } catch (const ConfigError& e) {
        throw ConfigError(label + e.what());
      }
    }
    const auto base = run_baseline(city, cfg);
    rows.push_back({city.city, "popularity", std::nullopt, base.mean, base.folds.size()});
  }
  return rows;
}

inline constexpr std::string_view kResultsHeader = "city;scorer;model;dim;window;epochs;avg_t_r;avg_t_p;avg_f1;n_folds";

inline void write_results(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultsHeader << '\n';
  char buf[96];
  for (const auto& r : rows) {
    out << r.city << ';' << r.scorer << ';';
    if (r.hyperparams) {
      out << to_string(r.hyperparams->model_kind) << ';' << r.hyperparams->dim << ';' << r.hyperparams->window
          << ';' << r.hyperparams->epochs << ';';
    } else {
      out << "-;-;-;-;";
    }
    std::snprintf(buf, sizeof buf, "%.4f;%.4f;%.4f;", r.mean.t_r, r.mean.t_p, r.mean.f1);
    out << buf << r.n_folds << '\n';
  }
}

/// Highest-F1 row per city (first wins on ties), in city order.
inline std::vector<ResultRow> best_per_city(std::span<const ResultRow> rows) {
  std::vector<ResultRow> best;
  for (const auto& r : rows) {
    auto it = std::find_if(best.begin(), best.end(), [&](const ResultRow& b) { return b.city == r.city; });
    if (it == best.end()) {
      best.push_back(r);
    } else if (r.mean.f1 > it->mean.f1) {
      *it = r;
    }
  }
  return best;
}

}  // namespace poitour
