#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "poitour/error.hpp"
#include "poitour/geo.hpp"
#include "poitour/text.hpp"

namespace poitour {

using Timestamp = std::int64_t;  // unix seconds, UTC

inline constexpr Timestamp kDefaultGapThreshold = 8 * 3600;
inline constexpr double kMinVisitDuration = 900.0;

inline constexpr std::string_view kVisitsHeader = "photo_id;user_id;timestamp;poi_id";
inline constexpr std::string_view kPoiHeader = "poi_id;name;category;lat;lon";

/// One geotagged photo already mapped to a POI.
struct VisitRecord {
  std::string photo_id;
  std::string user_id;
  Timestamp timestamp = 0;
  std::string poi_id;

  friend bool operator==(const VisitRecord&, const VisitRecord&) = default;
};

struct Poi {
  std::string poi_id;
  std::string name;  // normalized embedding token
  std::string category;
  geo::GeoPoint location;
};

struct Visit {
  std::string poi_id;
  Timestamp arrival = 0;
  Timestamp departure = 0;

  Timestamp duration() const noexcept { return departure - arrival; }
  friend bool operator==(const Visit&, const Visit&) = default;
};

struct Trajectory {
  std::string user_id;
  std::vector<Visit> visits;

  std::size_t size() const noexcept { return visits.size(); }
  /// Last departure minus first arrival.
  Timestamp elapsed() const noexcept {
    return visits.empty() ? 0 : visits.back().departure - visits.front().arrival;
  }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct PoiStats {
  std::string poi_id;
  std::int64_t photo_count = 0;
  double median_visit_duration = kMinVisitDuration;  // seconds

  friend bool operator==(const PoiStats&, const PoiStats&) = default;
};

using PoiStatsMap = std::map<std::string, PoiStats>;

/// POIs in file order with lookup by id.
class PoiTable {
 public:
  PoiTable() = default;
  explicit PoiTable(std::vector<Poi> pois) {
    for (auto& p : pois) add(std::move(p));
  }

  void add(Poi poi) {
    if (poi.poi_id.empty()) throw ConfigError("empty poi_id");
    if (poi.name.empty()) throw ConfigError("empty POI name for " + poi.poi_id);
    auto [it, inserted] = index_.emplace(poi.poi_id, pois_.size());
    if (!inserted) throw ConfigError("duplicate poi_id: " + poi.poi_id);
    pois_.push_back(std::move(poi));
  }

  const Poi* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &pois_[it->second];
  }

  const Poi& at(std::string_view id) const {
    if (const Poi* p = find(id)) return *p;
    throw LookupError("unknown POI: " + std::string(id));
  }

  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::span<const Poi> pois() const noexcept { return pois_; }
  std::size_t size() const noexcept { return pois_.size(); }
  bool empty() const noexcept { return pois_.empty(); }

 private:
  std::vector<Poi> pois_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline bool next_data_line(std::istream& in, std::string& buf, std::size_t& line_no,
                           std::string_view& out) {
  while (std::getline(in, buf)) {
    ++line_no;
    out = text::chomp(buf, line_no == 1);
    if (!text::trim(out).empty()) return true;
  }
  return false;
}

inline void expect_header(std::istream& in, std::string& buf, std::size_t& line_no,
                          std::string_view header) {
  std::string_view line;
  if (!next_data_line(in, buf, line_no, line)) throw ParseError("missing header line", 1);
  if (line != header) {
    throw ParseError("expected header '" + std::string(header) + "'", line_no, "header");
  }
}

}  // namespace detail

/// Reads a visits file. Unknown POI ids are kept; they are resolved later.
inline std::vector<VisitRecord> parse_visits(std::istream& in) {
  std::vector<VisitRecord> records;
  std::string buf;
  std::size_t line_no = 0;
  detail::expect_header(in, buf, line_no, kVisitsHeader);
  std::string_view line;
  while (detail::next_data_line(in, buf, line_no, line)) {
    const auto fields = text::split(line, ';');
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
    }
    VisitRecord r;
    r.photo_id = std::string(text::trim(fields[0]));
    r.user_id = std::string(text::trim(fields[1]));
    r.poi_id = std::string(text::trim(fields[3]));
    if (r.photo_id.empty()) throw ParseError("empty value", line_no, "photo_id");
    if (r.user_id.empty()) throw ParseError("empty value", line_no, "user_id");
    if (r.poi_id.empty()) throw ParseError("empty value", line_no, "poi_id");
    const auto ts = text::parse_int(fields[2]);
    if (!ts) throw ParseError("not an integer", line_no, "timestamp");
    if (*ts <= 0) throw ParseError("must be positive", line_no, "timestamp");
    r.timestamp = *ts;
    records.push_back(std::move(r));
  }
  return records;
}

inline PoiTable parse_pois(std::istream& in) {
  PoiTable table;
  std::string buf;
  std::size_t line_no = 0;
  detail::expect_header(in, buf, line_no, kPoiHeader);
  std::string_view line;
  while (detail::next_data_line(in, buf, line_no, line)) {
    const auto fields = text::split(line, ';');
    if (fields.size() != 5) {
      throw ParseError("expected 5 fields, got " + std::to_string(fields.size()), line_no);
    }
    Poi p;
    p.poi_id = std::string(text::trim(fields[0]));
    if (p.poi_id.empty()) throw ParseError("empty value", line_no, "poi_id");
    if (p.poi_id.find_first_of(",|") != std::string::npos) {
      throw ParseError("may not contain ',' or '|'", line_no, "poi_id");
    }
    p.name = text::normalize_token(fields[1]);
    if (p.name.empty()) throw ParseError("empty after normalization", line_no, "name");
    p.category = std::string(text::trim(fields[2]));
    const auto lat = text::parse_double(fields[3]);
    if (!lat) throw ParseError("not a number", line_no, "lat");
    const auto lon = text::parse_double(fields[4]);
    if (!lon) throw ParseError("not a number", line_no, "lon");
    try {
      p.location = geo::GeoPoint(*lat, *lon);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no, *lat < -90.0 || *lat > 90.0 ? "lat" : "lon");
    }
    if (table.contains(p.poi_id)) throw ParseError("duplicate poi_id", line_no, "poi_id");
    table.add(std::move(p));
  }
  return table;
}

/// Groups records by user; each list sorted by timestamp, ties by photo_id.
inline std::map<std::string, std::vector<VisitRecord>> build_user_sequences(
    std::span<const VisitRecord> records) {
  std::map<std::string, std::vector<VisitRecord>> by_user;
  for (const auto& r : records) by_user[r.user_id].push_back(r);
  for (auto& [user, seq] : by_user) {
    std::stable_sort(seq.begin(), seq.end(), [](const VisitRecord& a, const VisitRecord& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.photo_id < b.photo_id;
    });
  }
  return by_user;
}

/// Run-length collapse of consecutive same-POI records into timed visits.
inline std::vector<Visit> collapse_visits(std::span<const VisitRecord> sorted) {
  std::vector<Visit> visits;
  for (const auto& r : sorted) {
    if (!visits.empty() && visits.back().poi_id == r.poi_id) {
      visits.back().departure = r.timestamp;
    } else {
      visits.push_back(Visit{r.poi_id, r.timestamp, r.timestamp});
    }
  }
  return visits;
}

/// Starts a new trajectory whenever the rest between departure and the next
/// arrival is at least `gap_threshold` seconds.
inline std::vector<Trajectory> split_trajectories(std::span<const Visit> visits,
                                                  const std::string& user_id = {},
                                                  Timestamp gap_threshold = kDefaultGapThreshold) {
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < visits.size(); ++i) {
    if (i == 0 || visits[i].arrival - visits[i - 1].departure >= gap_threshold) {
      out.push_back(Trajectory{user_id, {}});
    }
    out.back().visits.push_back(visits[i]);
  }
  return out;
}

/// Median with floor; empty input yields the floor.
inline double floored_median(std::vector<double> values, double floor = kMinVisitDuration) {
  if (values.empty()) return floor;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return std::max(median, floor);
}

/// Photo counts from raw records, median visit durations from trajectories.
/// POIs listed in `table` but never visited get a zero count and the floor duration.
inline PoiStatsMap compute_poi_stats(std::span<const VisitRecord> records,
                                     std::span<const Trajectory> trajectories,
                                     const PoiTable* table = nullptr,
                                     double duration_floor = kMinVisitDuration) {
  PoiStatsMap stats;
  std::map<std::string, std::vector<double>> durations;
  if (table) {
    for (const auto& p : table->pois()) stats[p.poi_id].poi_id = p.poi_id;
  }
  for (const auto& r : records) {
    auto& s = stats[r.poi_id];
    s.poi_id = r.poi_id;
    ++s.photo_count;
  }
  for (const auto& t : trajectories) {
    for (const auto& v : t.visits) durations[v.poi_id].push_back(static_cast<double>(v.duration()));
  }
  for (auto& [id, s] : stats) {
    s.poi_id = id;
    auto it = durations.find(id);
    s.median_visit_duration =
        floored_median(it == durations.end() ? std::vector<double>{} : it->second, duration_floor);
  }
  for (auto& [id, d] : durations) {
    if (!stats.contains(id)) stats[id] = PoiStats{id, 0, floored_median(d, duration_floor)};
  }
  return stats;
}

/// Output of the full ingestion pipeline for one city.
struct IngestResult {
  std::vector<VisitRecord> records;  // after dropping unknown POIs
  std::vector<Trajectory> trajectories;
  PoiStatsMap stats;
  std::size_t user_count = 0;
  std::size_t dropped_records = 0;
};

inline IngestResult ingest(std::vector<VisitRecord> records, const PoiTable& table,
                           Timestamp gap_threshold = kDefaultGapThreshold) {
  IngestResult result;
  for (auto& r : records) {
    if (table.contains(r.poi_id)) {
      result.records.push_back(std::move(r));
    } else {
      ++result.dropped_records;
    }
  }
  const auto sequences = build_user_sequences(result.records);
  result.user_count = sequences.size();
  for (const auto& [user, seq] : sequences) {
    const auto visits = collapse_visits(seq);
    for (auto& t : split_trajectories(visits, user, gap_threshold)) {
      result.trajectories.push_back(std::move(t));
    }
  }
  result.stats = compute_poi_stats(result.records, result.trajectories, &table);
  return result;
}

}  // namespace poitour
