#pragma once

// Shared fixtures for the unit and acceptance suites: synthetic city
// generators and oracles that do not reuse library code paths.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "poitour/poitour.hpp"

namespace poitour::testing {

/// Great-circle distance from the chord between unit vectors: d = 2R asin(|c|/2).
inline double chord_distance(double lat1, double lon1, double lat2, double lon2) {
  constexpr double k = std::numbers::pi / 180.0;
  auto unit = [&](double lat, double lon) {
    return std::array<double, 3>{std::cos(lat * k) * std::cos(lon * k), std::cos(lat * k) * std::sin(lon * k),
                                 std::sin(lat * k)};
  };
  const auto a = unit(lat1, lon1);
  const auto b = unit(lat2, lon2);
  const double c = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                             (a[2] - b[2]) * (a[2] - b[2]));
  return 2.0 * 6'371'000.0 * std::asin(std::min(1.0, c / 2.0));
}

/// Brute-force overlap by nested loops over deduplicated lists.
struct BruteMetrics {
  double t_r, t_p, f1;
};

inline BruteMetrics brute_metrics(std::vector<std::string> su, std::vector<std::string> sp, bool conventional) {
  auto dedupe = [](std::vector<std::string>& v) {
    std::vector<std::string> out;
    for (const auto& x : v) {
      bool seen = false;
      for (const auto& y : out) seen = seen || y == x;
      if (!seen) out.push_back(x);
    }
    v = out;
  };
  dedupe(su);
  dedupe(sp);
  double inter = 0;
  for (const auto& a : su)
    for (const auto& b : sp)
      if (a == b) inter += 1;
  double r = sp.empty() ? 0.0 : inter / static_cast<double>(sp.size());
  double p = inter / static_cast<double>(su.size());
  if (conventional) {
    r = inter / static_cast<double>(su.size());
    p = sp.empty() ? 0.0 : inter / static_cast<double>(sp.size());
  }
  const double f = (r + p) == 0.0 ? 0.0 : 2 * r * p / (r + p);
  return {r, p, f};
}

inline std::string poi_name(std::size_t cluster, std::size_t i) {
  return "c" + std::to_string(cluster) + "_poi" + std::to_string(i);
}

/// Sentences drawn from disjoint token clusters; a sentence never mixes clusters.
inline Corpus cluster_corpus(std::size_t clusters, std::size_t per_cluster, std::size_t sentences_per_cluster,
                             std::size_t sentence_len, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Corpus c;
  for (std::size_t s = 0; s < sentences_per_cluster; ++s) {
    for (std::size_t k = 0; k < clusters; ++k) {
      Sentence sent;
      for (std::size_t i = 0; i < sentence_len; ++i) sent.push_back(poi_name(k, gen() % per_cluster));
      c.sentences.push_back(std::move(sent));
    }
  }
  c.n_users = c.sentences.size();
  return c;
}

/// Synthetic city: `clusters` x `per_cluster` POIs packed near one point,
/// users touring within a single cluster, photo counts equal for all POIs.
struct SyntheticCity {
  CityData data;
  std::vector<std::size_t> cluster_of_trajectory;
};

inline SyntheticCity planted_city(std::size_t clusters, std::size_t per_cluster, std::size_t users,
                                  std::uint64_t seed, std::size_t min_len = 3, std::size_t max_len = 6) {
  std::mt19937_64 gen(seed);
  SyntheticCity city;
  city.data.city = "planted";
  for (std::size_t k = 0; k < clusters; ++k) {
    for (std::size_t i = 0; i < per_cluster; ++i) {
      const double lat = 1.30 + 0.001 * static_cast<double>((gen() % 1000)) / 1000.0;
      const double lon = 103.80 + 0.001 * static_cast<double>((gen() % 1000)) / 1000.0;
      city.data.pois.add(Poi{"p" + std::to_string(k) + "_" + std::to_string(i), poi_name(k, i), "cat",
                             geo::GeoPoint(lat, lon)});
    }
  }
  for (std::size_t u = 0; u < users; ++u) {
    const std::size_t k = gen() % clusters;
    const std::size_t len = min_len + gen() % (max_len - min_len + 1);
    std::vector<std::size_t> order(per_cluster);
    for (std::size_t i = 0; i < per_cluster; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    Timestamp t = 1'500'000'000 + static_cast<Timestamp>(u) * 100'000;
    Trajectory traj{"u" + std::to_string(u), {}};
    for (std::size_t i = 0; i < len; ++i) {
      const std::string id = "p" + std::to_string(k) + "_" + std::to_string(order[i]);
      traj.visits.push_back(Visit{id, t, t + 1200});
      t += 1200 + 300;
    }
    city.data.trajectories.push_back(std::move(traj));
    city.cluster_of_trajectory.push_back(k);
  }
  // uniform popularity: every POI has the same photo count and duration
  for (const auto& p : city.data.pois.pois()) city.data.stats[p.poi_id] = PoiStats{p.poi_id, 10, 1200.0};
  return city;
}

inline HyperParams small_hyperparams(ModelKind kind = ModelKind::skipgram) {
  HyperParams hp;
  hp.model_kind = kind;
  hp.dim = 16;
  hp.window = 2;
  hp.epochs = 20;
  hp.bucket_count = 4096;
  return hp;
}

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("poitour_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace poitour::testing
