#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "uavloc/geo.hpp"
#include "uavloc/raster.hpp"
#include "uavloc/text.hpp"

namespace uavloc {

// A georeferenced source raster.
struct Mosaic {
  Raster raster;
  GeoTransform transform;
};

struct TileSpec {
  std::vector<int> windows_px = {512, 640, 768};
  double stride_fraction = 0.25;
};

struct TileRecord {
  std::string tile_id;
  int window_px = 0;
  int offset_x = 0;
  int offset_y = 0;
  GeoPoint center;
  std::string raster_path;
};

struct CutResult {
  std::vector<TileRecord> tiles;
  std::vector<std::string> warnings;  // e.g. window larger than mosaic
};

inline std::string tile_id_for(int window, int offset_x, int offset_y) {
  return "s" + std::to_string(window) + "_x" + std::to_string(offset_x) +
         "_y" + std::to_string(offset_y);
}

// Sliding-window enumeration over every configured scale. Partial windows
// at the right/bottom edges are discarded so all tiles share exact scale.
// Output is ordered by (window, offset_y, offset_x) and fully deterministic.
inline CutResult cut_tiles(const Mosaic& m, const std::vector<int>& windows,
                           double stride_fraction) {
  if (!(stride_fraction > 0.0 && stride_fraction <= 1.0)) {
    throw ConfigError("stride_fraction must be in (0, 1]");
  }
  CutResult result;
  for (int window : windows) {
    if (window < 1) throw ConfigError("window size must be >= 1");
    if (window > m.raster.width || window > m.raster.height) {
      result.warnings.push_back("window " + std::to_string(window) +
                                " exceeds mosaic " +
                                std::to_string(m.raster.width) + "x" +
                                std::to_string(m.raster.height) +
                                "; no tiles emitted for this scale");
      continue;
    }
    const int stride =
        static_cast<int>(std::lround(window * stride_fraction));
    if (stride < 1) {
      throw ConfigError("stride rounds to 0 for window " +
                        std::to_string(window));
    }
    const std::string ext = raster_extension(m.raster.channels);
    for (int oy = 0; oy + window <= m.raster.height; oy += stride) {
      for (int ox = 0; ox + window <= m.raster.width; ox += stride) {
        TileRecord t;
        t.tile_id = tile_id_for(window, ox, oy);
        t.window_px = window;
        t.offset_x = ox;
        t.offset_y = oy;
        t.center = pixel_to_geo(m.transform, ox + window / 2.0,
                                oy + window / 2.0);
        t.raster_path = "tiles/" + t.tile_id + ext;
        result.tiles.push_back(std::move(t));
      }
    }
  }
  return result;
}

// Writes one lossless raster per tile under out_dir, at each record's
// raster_path.
inline void persist_tiles(const Mosaic& m, const std::vector<TileRecord>& tiles,
                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "tiles");
  for (const TileRecord& t : tiles) {
    Raster tile = crop(m.raster, t.offset_x, t.offset_y, t.window_px);
    write_raster(tile, (out_dir / t.raster_path).string());
  }
}

inline constexpr const char* kTileManifestMagic = "#uavloc-tiles v1";

inline void save_tile_manifest(const std::vector<TileRecord>& tiles,
                               const std::string& path,
                               const std::vector<std::string>& header_lines = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write tile manifest: " + path);
  out << kTileManifestMagic << "\n";
  for (const auto& h : header_lines) out << "# " << h << "\n";
  for (const TileRecord& t : tiles) {
    out << t.tile_id << '\t' << t.window_px << '\t' << t.offset_x << '\t'
        << t.offset_y << '\t' << format_real(t.center.lat) << '\t'
        << format_real(t.center.lon) << '\t' << t.raster_path << '\n';
  }
}

inline std::vector<TileRecord> load_tile_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open tile manifest: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTileManifestMagic) {
    throw FormatError("bad tile manifest magic in " + path);
  }
  std::vector<TileRecord> tiles;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    const std::string ctx = path + ":" + std::to_string(lineno);
    if (f.size() != 7) throw FormatError(ctx + ": expected 7 fields");
    TileRecord t;
    t.tile_id = std::string(f[0]);
    t.window_px = static_cast<int>(parse_int(f[1], ctx));
    t.offset_x = static_cast<int>(parse_int(f[2], ctx));
    t.offset_y = static_cast<int>(parse_int(f[3], ctx));
    t.center.lat = parse_real(f[4], ctx);
    t.center.lon = parse_real(f[5], ctx);
    t.raster_path = std::string(f[6]);
    if (!t.center.valid()) throw FormatError(ctx + ": invalid tile center");
    tiles.push_back(std::move(t));
  }
  return tiles;
}

}  // namespace uavloc
