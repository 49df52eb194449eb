#pragma once

#include <stdexcept>
#include <string>

namespace uavloc {

// Base for all engine errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or unreadable input files (manifests, stores, rasters).
class FormatError : public Error {
public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

// Invalid configuration (bad stride, bad grid, out-of-range values).
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// A neighbor-search domain turned out empty; carries center and radius so
// the caller can decide whether to fall back to a global search.
class EmptyDomainError : public Error {
public:
  EmptyDomainError(double center_lat, double center_lon, double radius_m)
      : Error("empty search domain: center (" + std::to_string(center_lat) +
              ", " + std::to_string(center_lon) + "), radius " +
              std::to_string(radius_m) + " m"),
        center_lat(center_lat),
        center_lon(center_lon),
        radius_m(radius_m) {}

  double center_lat;
  double center_lon;
  double radius_m;
};

}  // namespace uavloc
