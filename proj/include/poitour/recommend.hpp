#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poitour/error.hpp"
#include "poitour/geo.hpp"
#include "poitour/ingest.hpp"
#include "poitour/model.hpp"

namespace poitour {

struct ScoringWeights {
  double past_penalty = 0.5;  // weight of the mean similarity to already visited POIs
  double walking_speed = geo::kDefaultWalkingSpeed;

  void validate() const {
    if (!(past_penalty >= 0.0) || !std::isfinite(past_penalty)) throw ConfigError("past penalty must be >= 0");
    if (!(walking_speed > 0.0) || !std::isfinite(walking_speed)) throw ConfigError("walking speed must be > 0");
  }
};

struct RecommendationRequest {
  std::string start_poi_id;
  double time_budget = 0;  // seconds
  ScoringWeights weights;
};

struct Stop {
  std::string poi_id;
  double arrival = 0;    // seconds from the start of the tour
  double departure = 0;
  friend bool operator==(const Stop&, const Stop&) = default;
};

struct Itinerary {
  std::vector<Stop> stops;
  double total_elapsed = 0;
  std::string scorer;
  std::size_t excluded_candidates = 0;  // POIs skipped for lack of a vector

  std::vector<std::string> poi_ids() const {
    std::vector<std::string> out;
    for (const auto& s : stops) out.push_back(s.poi_id);
    return out;
  }
};

/// Attraction to the current POI minus the weighted mean similarity to the
/// visited POIs.
inline double score_candidate(const std::vector<double>& candidate, const std::vector<double>& current,
                              std::span<const std::vector<double>> visited, double past_penalty) {
  double score = cosine(candidate, current);
  if (past_penalty != 0.0 && !visited.empty()) {
    double sum = 0;
    for (const auto& v : visited) sum += cosine(candidate, v);
    score -= past_penalty * (sum / static_cast<double>(visited.size()));
  }
  return score;
}

inline double visit_duration(const PoiStatsMap& stats, const std::string& poi_id) {
  auto it = stats.find(poi_id);
  return it == stats.end() ? kMinVisitDuration : it->second.median_visit_duration;
}

inline std::int64_t photo_count(const PoiStatsMap& stats, const std::string& poi_id) {
  auto it = stats.find(poi_id);
  return it == stats.end() ? 0 : it->second.photo_count;
}

/// Greedy itinerary construction shared by every scorer.
///
/// `scorer(candidate, current, visited)` works on POI table positions and
/// returns nullopt to exclude a candidate. Each step keeps the unvisited POIs
/// whose travel plus visit time fits the remaining budget and takes the best
/// score, breaking ties by photo count and then poi_id. The start POI's visit
/// is charged first, clipped to the budget.
template <class Scorer>
Itinerary plan_itinerary(const RecommendationRequest& request, const PoiTable& table, const PoiStatsMap& stats,
                         Scorer&& scorer, std::string scorer_name) {
  request.weights.validate();
  if (!(request.time_budget > 0.0)) throw ConfigError("time budget must be positive");
  const Poi* start_poi = table.find(request.start_poi_id);
  if (!start_poi) throw LookupError("unknown start POI: " + request.start_poi_id);

  const auto pois = table.pois();
  const std::size_t n = pois.size();
  std::vector<double> duration(n);
  std::vector<std::int64_t> count(n);
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    duration[i] = visit_duration(stats, pois[i].poi_id);
    count[i] = photo_count(stats, pois[i].poi_id);
    if (&pois[i] == start_poi) start = i;
  }

  Itinerary it;
  it.scorer = std::move(scorer_name);
  const double budget = request.time_budget;
  double clock = std::min(duration[start], budget);
  it.stops.push_back(Stop{pois[start].poi_id, 0.0, clock});

  std::vector<bool> used(n, false);
  std::vector<bool> excluded(n, false);
  used[start] = true;
  std::vector<std::size_t> visited{start};
  std::size_t current = start;

  for (;;) {
    std::optional<std::size_t> best;
    double best_score = 0;
    double best_arrival = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c] || excluded[c]) continue;
      const double travel = geo::travel_time(
          geo::haversine_distance(pois[current].location, pois[c].location), request.weights.walking_speed);
      const double arrival = clock + travel;
      if (!(arrival + duration[c] <= budget)) continue;
      const std::optional<double> s = scorer(c, current, std::span<const std::size_t>(visited));
      if (!s) {
        excluded[c] = true;
        ++it.excluded_candidates;
        continue;
      }
      const bool better = !best || *s > best_score ||
                          (*s == best_score && (count[c] > count[*best] ||
                                                (count[c] == count[*best] && pois[c].poi_id < pois[*best].poi_id)));
      if (better) {
        best = c;
        best_score = *s;
        best_arrival = arrival;
      }
    }
    if (!best) break;
    const std::size_t c = *best;
    const double departure = best_arrival + duration[c];
    it.stops.push_back(Stop{pois[c].poi_id, best_arrival, departure});
    clock = departure;
    used[c] = true;
    visited.push_back(c);
    current = c;
  }
  it.total_elapsed = clock;
  return it;
}

/// Embedding scorer over a POI table; vectors are resolved once up front.
class EmbeddingScorer {
 public:
  EmbeddingScorer(const EmbeddingModel& model, const PoiTable& table, double past_penalty)
      : past_penalty_(past_penalty) {
    vectors_.reserve(table.size());
    std::size_t resolved = 0;
    for (const auto& p : table.pois()) {
      vectors_.push_back(model.try_vector(p.name));
      if (vectors_.back()) ++resolved;
    }
    if (resolved == 0) throw LookupError("no POI in the table has a vector in the model");
  }

  bool has_vector(std::size_t poi) const { return vectors_.at(poi).has_value(); }

  std::optional<double> operator()(std::size_t candidate, std::size_t current,
                                   std::span<const std::size_t> visited) const {
    if (!vectors_[candidate]) return std::nullopt;
    const auto& cand = *vectors_[candidate];
    double score = cosine(cand, *vectors_[current]);
    if (past_penalty_ != 0.0 && !visited.empty()) {
      double sum = 0;
      for (auto v : visited) sum += cosine(cand, *vectors_[v]);
      score -= past_penalty_ * (sum / static_cast<double>(visited.size()));
    }
    return score;
  }

 private:
  double past_penalty_;
  std::vector<std::optional<std::vector<double>>> vectors_;
};

/// Score = photo count.
struct PopularityScorer {
  std::vector<double> counts;

  PopularityScorer(const PoiTable& table, const PoiStatsMap& stats) {
    for (const auto& p : table.pois()) counts.push_back(static_cast<double>(photo_count(stats, p.poi_id)));
  }
  std::optional<double> operator()(std::size_t candidate, std::size_t, std::span<const std::size_t>) const {
    return counts[candidate];
  }
};

inline Itinerary recommend_itinerary(const RecommendationRequest& request, const EmbeddingModel& model,
                                     const PoiTable& table, const PoiStatsMap& stats) {
  if (!table.contains(request.start_poi_id)) throw LookupError("unknown start POI: " + request.start_poi_id);
  const EmbeddingScorer scorer(model, table, request.weights.past_penalty);
  if (!model.try_vector(table.at(request.start_poi_id).name)) {
    throw LookupError("start POI has no vector in the model: " + request.start_poi_id);
  }
  return plan_itinerary(request, table, stats, scorer, "embedding");
}

inline Itinerary baseline_popularity(const RecommendationRequest& request, const PoiTable& table,
                                     const PoiStatsMap& stats) {
  return plan_itinerary(request, table, stats, PopularityScorer(table, stats), "popularity");
}

}  // namespace poitour
