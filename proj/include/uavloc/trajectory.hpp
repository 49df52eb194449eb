#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "uavloc/replay.hpp"

namespace uavloc {

// GeoJSON FeatureCollection: truth and predicted paths as LineStrings plus
// one Point per step carrying its localization error in meters.
inline nlohmann::json trajectory_geojson(const ReplayReport& report) {
  using nlohmann::json;
  json truth_coords = json::array();
  json pred_coords = json::array();
  json features = json::array();
  for (const StepResult& s : report.steps) {
    truth_coords.push_back({s.truth.lon, s.truth.lat});
    pred_coords.push_back({s.predicted.lon, s.predicted.lat});
    features.push_back({
        {"type", "Feature"},
        {"geometry",
         {{"type", "Point"}, {"coordinates", {s.predicted.lon, s.predicted.lat}}}},
        {"properties",
         {{"step", s.step},
          {"query_id", s.query_id},
          {"error_m", s.error_m},
          {"fallback_used", s.fallback_used}}},
    });
  }
  json truth_line = {
      {"type", "Feature"},
      {"geometry", {{"type", "LineString"}, {"coordinates", truth_coords}}},
      {"properties", {{"name", "truth"}}},
  };
  json pred_line = {
      {"type", "Feature"},
      {"geometry", {{"type", "LineString"}, {"coordinates", pred_coords}}},
      {"properties", {{"name", "predicted"}, {"strategy", report.strategy}}},
  };
  json fc = {
      {"type", "FeatureCollection"},
      {"features", json::array({truth_line, pred_line})},
  };
  for (auto& f : features) fc["features"].push_back(f);
  return fc;
}

inline void save_trajectory(const ReplayReport& report,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write trajectory: " + path);
  out << trajectory_geojson(report).dump(2) << "\n";
}

}  // namespace uavloc
