#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uavloc/geo.hpp"
#include "uavloc/text.hpp"

namespace uavloc {

enum class View { drone, satellite };

inline std::string to_string(View v) {
  return v == View::drone ? "drone" : "satellite";
}

inline View parse_view(std::string_view s, const std::string& context) {
  if (s == "drone") return View::drone;
  if (s == "satellite") return View::satellite;
  throw FormatError(context + ": bad view '" + std::string(s) + "'");
}

enum class Split { train, query, gallery };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::query: return "query";
    default: return "gallery";
  }
}

inline Split parse_split(std::string_view s, const std::string& context) {
  if (s == "train") return Split::train;
  if (s == "query") return Split::query;
  if (s == "gallery") return Split::gallery;
  throw FormatError(context + ": bad split '" + std::string(s) + "'");
}

struct SampleRecord {
  std::string sample_id;
  std::string class_id;
  View view = View::drone;
  GeoPoint geo;
  std::optional<double> altitude_m;
  std::string image_path;
};

struct SplitManifest {
  Split split = Split::gallery;
  std::vector<SampleRecord> records;
};

inline constexpr const char* kSampleManifestMagic = "#uavloc-manifest v1";

// Intra-class geo spread bound; waypoint error is stated as within 1 m.
inline constexpr double kDefaultClassGeoToleranceM = 1.0;

namespace detail {

inline void validate_manifest(const SplitManifest& m, const std::string& path,
                              double geo_tolerance_m) {
  std::set<std::string> ids;
  std::map<std::string, GeoPoint> class_first;
  for (const SampleRecord& r : m.records) {
    if (r.class_id.empty()) {
      throw FormatError(path + ": empty class_id for sample '" + r.sample_id +
                        "'");
    }
    if (!r.geo.valid()) {
      throw FormatError(path + ": invalid geo for sample '" + r.sample_id +
                        "'");
    }
    if (!ids.insert(r.sample_id).second) {
      throw FormatError(path + ": duplicate sample_id '" + r.sample_id + "'");
    }
    auto [it, inserted] = class_first.emplace(r.class_id, r.geo);
    if (!inserted &&
        meters_distance(it->second, r.geo) > geo_tolerance_m) {
      throw FormatError(path + ": class '" + r.class_id +
                        "' geo spread exceeds tolerance at sample '" +
                        r.sample_id + "'");
    }
  }
}

}  // namespace detail

inline void save_manifest(const SplitManifest& m, const std::string& path,
                          const std::vector<std::string>& header_lines = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write manifest: " + path);
  out << kSampleManifestMagic << " split=" << to_string(m.split) << "\n";
  for (const auto& h : header_lines) out << "# " << h << "\n";
  for (const SampleRecord& r : m.records) {
    out << r.sample_id << '\t' << r.class_id << '\t' << to_string(r.view)
        << '\t' << format_real(r.geo.lat) << '\t' << format_real(r.geo.lon)
        << '\t' << (r.altitude_m ? format_real(*r.altitude_m) : "-") << '\t'
        << r.image_path << '\n';
  }
}

inline SampleRecord parse_sample_fields(
    const std::vector<std::string_view>& f, const std::string& ctx) {
  SampleRecord r;
  r.sample_id = std::string(f[0]);
  r.class_id = std::string(f[1]);
  r.view = parse_view(f[2], ctx);
  r.geo.lat = parse_real(f[3], ctx);
  r.geo.lon = parse_real(f[4], ctx);
  if (f[5] != "-") r.altitude_m = parse_real(f[5], ctx);
  r.image_path = std::string(f[6]);
  return r;
}

inline SplitManifest load_manifest(
    const std::string& path,
    double geo_tolerance_m = kDefaultClassGeoToleranceM) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind(kSampleManifestMagic, 0) != 0) {
    throw FormatError("bad manifest magic in " + path);
  }
  SplitManifest m;
  const std::string split_key = " split=";
  auto pos = line.find(split_key);
  if (pos == std::string::npos) {
    throw FormatError(path + ": manifest header missing split tag");
  }
  m.split = parse_split(line.substr(pos + split_key.size()), path + ":1");

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::string ctx = path + ":" + std::to_string(lineno);
    auto f = split_tabs(line);
    if (f.size() != 7) throw FormatError(ctx + ": expected 7 fields");
    m.records.push_back(parse_sample_fields(f, ctx));
  }
  detail::validate_manifest(m, path, geo_tolerance_m);
  return m;
}

// Ground-truth position of a sampling point: arithmetic mean of the member
// geos (members already agree within tolerance).
inline GeoPoint class_geo(const SplitManifest& m, const std::string& class_id) {
  double lat = 0.0, lon = 0.0;
  int n = 0;
  for (const SampleRecord& r : m.records) {
    if (r.class_id == class_id) {
      lat += r.geo.lat;
      lon += r.geo.lon;
      ++n;
    }
  }
  if (n == 0) throw ConfigError("unknown class_id '" + class_id + "'");
  return GeoPoint{lat / n, lon / n};
}

inline std::map<std::string, int> class_counts(const SplitManifest& m) {
  std::map<std::string, int> counts;
  for (const SampleRecord& r : m.records) ++counts[r.class_id];
  return counts;
}

}  // namespace uavloc
