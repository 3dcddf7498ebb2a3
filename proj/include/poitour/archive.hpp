#pragma once

// Trajectory archive and POI statistics files.
//
// Archive: one trajectory per line, `user_id;poi,arrival,departure|poi,arrival,departure...`
// Stats:   header `poi_id;photo_count;median_visit_duration`, one POI per line.

#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "poitour/error.hpp"
#include "poitour/ingest.hpp"
#include "poitour/text.hpp"

namespace poitour {

inline constexpr std::string_view kStatsHeader = "poi_id;photo_count;median_visit_duration";

inline void write_archive(std::ostream& out, std::span<const Trajectory> trajectories) {
  for (const auto& t : trajectories) {
    out << t.user_id << ';';
    for (std::size_t i = 0; i < t.visits.size(); ++i) {
      const auto& v = t.visits[i];
      if (i) out << '|';
      out << v.poi_id << ',' << v.arrival << ',' << v.departure;
    }
    out << '\n';
  }
}

inline std::vector<Trajectory> read_archive(std::istream& in) {
  std::vector<Trajectory> out;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    const auto line = text::chomp(buf, line_no == 1);
    if (text::trim(line).empty()) continue;
    const auto sep = line.find(';');
    if (sep == std::string_view::npos) throw ParseError("missing ';' after user_id", line_no);
    Trajectory t;
    t.user_id = std::string(line.substr(0, sep));
    if (t.user_id.empty()) throw ParseError("empty value", line_no, "user_id");
    const auto body = line.substr(sep + 1);
    if (body.empty()) throw ParseError("trajectory has no visits", line_no);
    for (const auto item : text::split(body, '|')) {
      const auto parts = text::split(item, ',');
      if (parts.size() != 3) throw ParseError("visit needs poi,arrival,departure", line_no, "visit");
      Visit v;
      v.poi_id = std::string(parts[0]);
      if (v.poi_id.empty()) throw ParseError("empty value", line_no, "poi_id");
      const auto a = text::parse_int(parts[1]);
      const auto d = text::parse_int(parts[2]);
      if (!a) throw ParseError("not an integer", line_no, "arrival");
      if (!d) throw ParseError("not an integer", line_no, "departure");
      if (*d < *a) throw ParseError("departure before arrival", line_no, "departure");
      v.arrival = *a;
      v.departure = *d;
      t.visits.push_back(std::move(v));
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline void write_stats(std::ostream& out, const PoiStatsMap& stats) {
  out << kStatsHeader << '\n';
  char num[64];
  for (const auto& [id, s] : stats) {
    std::snprintf(num, sizeof num, "%.1f", s.median_visit_duration);
    out << id << ';' << s.photo_count << ';' << num << '\n';
  }
}

inline PoiStatsMap read_stats(std::istream& in) {
  PoiStatsMap stats;
  std::string buf;
  std::size_t line_no = 0;
  detail::expect_header(in, buf, line_no, kStatsHeader);
  std::string_view line;
  while (detail::next_data_line(in, buf, line_no, line)) {
    const auto f = text::split(line, ';');
    if (f.size() != 3) throw ParseError("expected 3 fields", line_no);
    PoiStats s;
    s.poi_id = std::string(text::trim(f[0]));
    const auto count = text::parse_int(f[1]);
    const auto dur = text::parse_double(f[2]);
    if (s.poi_id.empty()) throw ParseError("empty value", line_no, "poi_id");
    if (!count || *count < 0) throw ParseError("not a non-negative integer", line_no, "photo_count");
    if (!dur || *dur < 0) throw ParseError("not a non-negative number", line_no, "median_visit_duration");
    s.photo_count = *count;
    s.median_visit_duration = *dur;
    stats[s.poi_id] = s;
  }
  return stats;
}

}  // namespace poitour
