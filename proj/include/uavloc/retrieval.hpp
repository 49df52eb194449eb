#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "uavloc/dataset.hpp"
#include "uavloc/embed.hpp"
#include "uavloc/geo.hpp"
#include "uavloc/text.hpp"
#include "uavloc/tilecut.hpp"

namespace uavloc {

struct IndexEntry {
  std::string sample_id;
  Embedding embedding;
  GeoPoint geo;
  std::string class_id;
};

// The geo-tagged satellite gallery: embeddings joined with geo-tags.
struct GeoIndex {
  std::uint32_t dimension = 0;
  std::vector<IndexEntry> entries;
};

struct RankedEntry {
  std::string sample_id;
  double distance = 0.0;
  GeoPoint geo;
  std::string class_id;
};

struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;  // ascending (distance, sample_id)
  std::string strategy;              // descriptor of the search used
};

// Joins an embedding store with a sample manifest by sample_id.
inline GeoIndex build_index(const EmbeddingStore& store,
                            const SplitManifest& manifest) {
  std::map<std::string, const SampleRecord*> by_id;
  for (const SampleRecord& r : manifest.records) by_id[r.sample_id] = &r;
  GeoIndex index;
  index.dimension = store.dimension;
  index.entries.reserve(store.entries.size());
  for (const Embedding& e : store.entries) {
    auto it = by_id.find(e.sample_id);
    if (it == by_id.end()) {
      throw ConfigError("build_index: no manifest record for sample '" +
                        e.sample_id + "'");
    }
    index.entries.push_back(
        {e.sample_id, e, it->second->geo, it->second->class_id});
  }
  return index;
}

// Joins an embedding store with a tile manifest (class_id = tile_id).
inline GeoIndex build_index(const EmbeddingStore& store,
                            const std::vector<TileRecord>& tiles) {
  std::map<std::string, const TileRecord*> by_id;
  for (const TileRecord& t : tiles) by_id[t.tile_id] = &t;
  GeoIndex index;
  index.dimension = store.dimension;
  index.entries.reserve(store.entries.size());
  for (const Embedding& e : store.entries) {
    auto it = by_id.find(e.sample_id);
    if (it == by_id.end()) {
      throw ConfigError("build_index: no tile record for sample '" +
                        e.sample_id + "'");
    }
    index.entries.push_back(
        {e.sample_id, e, it->second->center, it->second->tile_id});
  }
  return index;
}

// Exhaustive scan over the whole gallery; k smallest distances, ties broken
// by ascending sample_id so rankings are reproducible everywhere.
inline RankedList rank_global(const GeoIndex& index, const Embedding& query,
                              std::size_t k) {
  if (index.entries.empty()) throw ConfigError("rank_global: empty index");
  if (k < 1) throw ConfigError("rank_global: k must be >= 1");
  if (query.vector.size() != index.dimension) {
    throw ConfigError("rank_global: query dimension mismatch");
  }
  std::vector<RankedEntry> all;
  all.reserve(index.entries.size());
  for (const IndexEntry& e : index.entries) {
    all.push_back(
        {e.sample_id, euclidean(query, e.embedding), e.geo, e.class_id});
  }
  const std::size_t take = std::min(k, all.size());
  auto cmp = [](const RankedEntry& a, const RankedEntry& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.sample_id < b.sample_id;
  };
  std::partial_sort(all.begin(), all.begin() + take, all.end(), cmp);
  all.resize(take);
  RankedList out;
  out.query_id = query.sample_id;
  out.entries = std::move(all);
  out.strategy = "global";
  return out;
}

// Search-domain restriction: keep entries strictly closer than radius_m to
// the center. Strict inequality excludes boundary tiles. An infinite radius
// is the unbounded sentinel and keeps everything.
inline GeoIndex filter_neighbor(const GeoIndex& index, const GeoPoint& center,
                                double radius_m) {
  if (!(radius_m > 0.0)) {
    throw ConfigError("filter_neighbor: radius must be > 0");
  }
  if (std::isinf(radius_m)) return index;
  GeoIndex out;
  out.dimension = index.dimension;
  for (const IndexEntry& e : index.entries) {
    if (meters_distance(e.geo, center) < radius_m) out.entries.push_back(e);
  }
  return out;
}

inline RankedList rank_neighbor(const GeoIndex& index, const Embedding& query,
                                const GeoPoint& center, double radius_m,
                                std::size_t k) {
  GeoIndex domain = filter_neighbor(index, center, radius_m);
  if (domain.entries.empty()) {
    throw EmptyDomainError(center.lat, center.lon, radius_m);
  }
  RankedList out = rank_global(domain, query, k);
  out.strategy = "neighbor center=" + format_real(center.lat) + "," +
                 format_real(center.lon) + " radius_m=" + format_real(radius_m);
  return out;
}

// --- Ranked output file ------------------------------------------------
// One line per (query, rank): query_id, rank, sample_id, distance (17 sig
// digits), lat, lon, class_id.

inline constexpr const char* kRankedFileMagic = "#uavloc-ranked v1";

inline void save_ranked(const std::vector<RankedList>& lists,
                        const std::string& path,
                        const std::vector<std::string>& header_lines = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write ranked file: " + path);
  out << kRankedFileMagic << "\n";
  for (const auto& h : header_lines) out << "# " << h << "\n";
  for (const RankedList& rl : lists) {
    int rank = 1;
    for (const RankedEntry& e : rl.entries) {
      out << rl.query_id << '\t' << rank++ << '\t' << e.sample_id << '\t'
          << format_real17(e.distance) << '\t' << format_real(e.geo.lat)
          << '\t' << format_real(e.geo.lon) << '\t' << e.class_id << '\n';
    }
  }
}

inline std::vector<RankedList> load_ranked(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open ranked file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kRankedFileMagic) {
    throw FormatError("bad ranked-file magic in " + path);
  }
  std::vector<RankedList> lists;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::string ctx = path + ":" + std::to_string(lineno);
    auto f = split_tabs(line);
    if (f.size() != 7) throw FormatError(ctx + ": expected 7 fields");
    const std::string query_id(f[0]);
    const long rank = parse_int(f[1], ctx);
    if (lists.empty() || lists.back().query_id != query_id) {
      if (rank != 1) throw FormatError(ctx + ": ranks must start at 1");
      lists.push_back({query_id, {}, ""});
    } else if (rank != static_cast<long>(lists.back().entries.size()) + 1) {
      throw FormatError(ctx + ": non-contiguous rank");
    }
    RankedEntry e;
    e.sample_id = std::string(f[2]);
    e.distance = parse_real(f[3], ctx);
    e.geo.lat = parse_real(f[4], ctx);
    e.geo.lon = parse_real(f[5], ctx);
    e.class_id = std::string(f[6]);
    lists.back().entries.push_back(std::move(e));
  }
  return lists;
}

}  // namespace uavloc
