#pragma once

// Itinerary record (one JSON object per line) and GeoJSON route export.

#include <string>

#include <nlohmann/json.hpp>

#include "poitour/error.hpp"
#include "poitour/ingest.hpp"
#include "poitour/recommend.hpp"

namespace poitour {

inline nlohmann::ordered_json itinerary_record(const RecommendationRequest& request, const Itinerary& it) {
  nlohmann::ordered_json rec;
  rec["start"] = request.start_poi_id;
  rec["budget"] = request.time_budget;
  rec["scorer"] = it.scorer;
  auto stops = nlohmann::ordered_json::array();
  for (const auto& s : it.stops) {
    stops.push_back({{"poi_id", s.poi_id}, {"arrival", s.arrival}, {"departure", s.departure}});
  }
  rec["stops"] = std::move(stops);
  rec["total_elapsed"] = it.total_elapsed;
  return rec;
}

inline std::string itinerary_line(const RecommendationRequest& request, const Itinerary& it) {
  return itinerary_record(request, it).dump();
}

/// Parses a record written by itinerary_line.
inline Itinerary parse_itinerary_record(const std::string& line, RecommendationRequest* request = nullptr) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("itinerary record is not JSON: ") + e.what());
  }
  try {
    Itinerary it;
    it.scorer = j.at("scorer").get<std::string>();
    it.total_elapsed = j.at("total_elapsed").get<double>();
    for (const auto& s : j.at("stops")) {
      it.stops.push_back(Stop{s.at("poi_id").get<std::string>(), s.at("arrival").get<double>(),
                              s.at("departure").get<double>()});
    }
    if (request) {
      request->start_poi_id = j.at("start").get<std::string>();
      request->time_budget = j.at("budget").get<double>();
    }
    return it;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed itinerary record: ") + e.what());
  }
}

/// FeatureCollection with a Point per stop and a LineString through the stops.
inline nlohmann::ordered_json route_geojson(const Itinerary& it, const PoiTable& table) {
  auto features = nlohmann::ordered_json::array();
  auto line = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < it.stops.size(); ++i) {
    const auto& stop = it.stops[i];
    const Poi& poi = table.at(stop.poi_id);
    const auto coord = nlohmann::ordered_json::array({poi.location.longitude(), poi.location.latitude()});
    line.push_back(coord);
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", coord}};
    f["properties"] = {{"order", i},
                       {"poi_id", stop.poi_id},
                       {"name", poi.name},
                       {"arrival", stop.arrival},
                       {"departure", stop.departure}};
    features.push_back(std::move(f));
  }
  nlohmann::ordered_json route;
  route["type"] = "Feature";
  route["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(line)}};
  route["properties"] = {{"scorer", it.scorer}, {"total_elapsed", it.total_elapsed}};
  features.push_back(std::move(route));
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace poitour
