#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "uavloc/embed.hpp"
#include "uavloc/geo.hpp"
#include "uavloc/raster.hpp"

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed = 42) {
  return std::mt19937_64(seed);
}

inline uavloc::GeoPoint random_point(std::mt19937_64& g) {
  std::uniform_real_distribution<double> lat(-89.0, 89.0);
  std::uniform_real_distribution<double> lon(-179.0, 179.0);
  return {lat(g), lon(g)};
}

// Random point within roughly box_deg degrees of a center, for local-scale
// scenarios.
inline uavloc::GeoPoint random_point_near(std::mt19937_64& g,
                                          const uavloc::GeoPoint& center,
                                          double box_deg) {
  std::uniform_real_distribution<double> d(-box_deg, box_deg);
  return {center.lat + d(g), center.lon + d(g)};
}

inline uavloc::Raster random_raster(std::mt19937_64& g, int w, int h,
                                    int channels) {
  uavloc::Raster r = uavloc::Raster::make(w, h, channels);
  std::uniform_int_distribution<int> px(0, 255);
  for (auto& v : r.pixels) v = static_cast<std::uint8_t>(px(g));
  return r;
}

inline std::vector<float> random_vector(std::mt19937_64& g, std::size_t d) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(d);
  for (auto& x : v) x = u(g);
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil
