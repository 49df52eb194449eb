#pragma once

#include <cmath>
#include <utility>

#include "uavloc/error.hpp"

namespace uavloc {

// Mean Earth radius in meters.
inline constexpr double kEarthRadiusM = 6371008.8;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  bool valid() const {
    return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 &&
           lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
  }

  friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
    return a.lat == b.lat && a.lon == b.lon;
  }
};

// North-up affine mapping between pixel and geographic coordinates.
// No rotation/shear terms; rotated mosaics are rejected at load.
struct GeoTransform {
  double origin_lon = 0.0;
  double origin_lat = 0.0;
  double px_size_lon = 1.0;  // degrees per pixel, > 0
  double px_size_lat = -1.0; // degrees per pixel, < 0 (north-up)

  bool valid() const {
    return std::isfinite(origin_lon) && std::isfinite(origin_lat) &&
           std::isfinite(px_size_lon) && std::isfinite(px_size_lat) &&
           px_size_lon > 0.0 && px_size_lat < 0.0;
  }
};

// Raw Euclidean distance in degree space between two points.
// No meter conversion: the SDM metric scales this value directly.
inline double degree_distance(const GeoPoint& a, const GeoPoint& b) {
  const double dlon = a.lon - b.lon;
  const double dlat = a.lat - b.lat;
  return std::sqrt(dlon * dlon + dlat * dlat);
}

// Haversine great-circle distance in meters on a mean-radius sphere.
inline double meters_distance(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kDegToRad = M_PI / 180.0;
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double sin_dlat = std::sin(dlat / 2.0);
  const double sin_dlon = std::sin(dlon / 2.0);
  const double h =
      sin_dlat * sin_dlat + std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

inline GeoPoint pixel_to_geo(const GeoTransform& t, double px, double py) {
  GeoPoint p;
  p.lon = t.origin_lon + px * t.px_size_lon;
  p.lat = t.origin_lat + py * t.px_size_lat;
  if (!p.valid()) {
    throw ConfigError("pixel_to_geo: result outside valid lat/lon range");
  }
  return p;
}

inline std::pair<double, double> geo_to_pixel(const GeoTransform& t,
                                              const GeoPoint& p) {
  return {(p.lon - t.origin_lon) / t.px_size_lon,
          (p.lat - t.origin_lat) / t.px_size_lat};
}

}  // namespace uavloc
