#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "poitour/error.hpp"

namespace poitour::geo {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;
inline constexpr double kDefaultWalkingSpeed = 1.25;  // m/s

/// A WGS84 coordinate in decimal degrees. Always within range once constructed.
class GeoPoint {
 public:
  GeoPoint() = default;

  GeoPoint(double latitude, double longitude) : lat_(latitude), lon_(longitude) {
    if (!(latitude >= -90.0 && latitude <= 90.0)) {
      throw ConfigError("latitude out of range [-90, 90]: " + std::to_string(latitude));
    }
    if (!(longitude >= -180.0 && longitude <= 180.0)) {
      throw ConfigError("longitude out of range [-180, 180]: " + std::to_string(longitude));
    }
  }

  double latitude() const noexcept { return lat_; }
  double longitude() const noexcept { return lon_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

/// Great-circle distance in meters on a sphere of radius kEarthRadiusMeters.
inline double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  if (a == b) return 0.0;
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const double lat1 = a.latitude() * kDegToRad;
  const double lat2 = b.latitude() * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.longitude() - a.longitude()) * kDegToRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  if (h > 1.0) h = 1.0;
  return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(h));
}

/// Seconds needed to cover `distance` meters at `speed` m/s.
inline double travel_time(double distance, double speed) {
  if (!(speed > 0.0)) throw ConfigError("travel speed must be positive");
  if (!(distance >= 0.0)) throw ConfigError("distance must be non-negative");
  return distance / speed;
}

}  // namespace poitour::geo
