#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "uavloc/error.hpp"
#include "uavloc/raster.hpp"

namespace uavloc {

struct Embedding {
  std::string sample_id;
  std::vector<float> vector;
  bool normalized = false;
};

struct EmbeddingStore {
  std::uint32_t dimension = 0;
  std::vector<Embedding> entries;

  const Embedding* find(const std::string& sample_id) const {
    for (const Embedding& e : entries) {
      if (e.sample_id == sample_id) return &e;
    }
    return nullptr;
  }
};

inline double vector_norm(const std::vector<float>& v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

// Scales to unit norm; near-zero input is a degenerate-vector error and the
// caller decides the fallback.
inline std::vector<float> l2_normalize(const std::vector<float>& v) {
  const double norm = vector_norm(v);
  if (norm < 1e-12) throw ConfigError("l2_normalize: degenerate zero vector");
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(v[i] / norm);
  }
  return out;
}

inline double euclidean(const Embedding& a, const Embedding& b) {
  if (a.vector.size() != b.vector.size()) {
    throw ConfigError("euclidean: dimension mismatch (" +
                      std::to_string(a.vector.size()) + " vs " +
                      std::to_string(b.vector.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.vector.size(); ++i) {
    const double d = static_cast<double>(a.vector[i]) - b.vector[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Deterministic grid-of-cell-means descriptor: a stand-in feature so the
// retrieval pipeline runs without a trained model. d = grid^2 * channels.
// Constant images produce a zero vector, which is kept unnormalized.
inline Embedding toy_descriptor(const Raster& img, int grid,
                                const std::string& sample_id = {}) {
  if (img.empty()) throw ConfigError("toy_descriptor: empty raster");
  if (grid < 1 || grid > img.width || grid > img.height) {
    throw ConfigError("toy_descriptor: grid must be in [1, min(raster dims)]");
  }
  Embedding e;
  e.sample_id = sample_id;
  e.vector.reserve(static_cast<std::size_t>(grid) * grid * img.channels);
  double total = 0.0;
  for (int gy = 0; gy < grid; ++gy) {
    const int y0 = gy * img.height / grid;
    const int y1 = (gy + 1) * img.height / grid;
    for (int gx = 0; gx < grid; ++gx) {
      const int x0 = gx * img.width / grid;
      const int x1 = (gx + 1) * img.width / grid;
      for (int c = 0; c < img.channels; ++c) {
        double sum = 0.0;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) sum += img.at(x, y, c);
        }
        const double mean =
            sum / (static_cast<double>(y1 - y0) * (x1 - x0));
        e.vector.push_back(static_cast<float>(mean));
        total += mean;
      }
    }
  }
  const double global_mean = total / e.vector.size();
  for (float& x : e.vector) x = static_cast<float>(x - global_mean);
  if (vector_norm(e.vector) < 1e-12) {
    e.normalized = false;  // degenerate: constant image
    return e;
  }
  e.vector = l2_normalize(e.vector);
  e.normalized = true;
  return e;
}

// --- Binary store format ---------------------------------------------------
// little-endian: "EMB1" | u32 count | u32 dimension |
// count*dimension f32 row-major | count ids, each u16 length + UTF-8 bytes.

namespace detail {

inline void put_u16(std::ostream& out, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

inline std::uint16_t get_u16(std::istream& in, const std::string& ctx) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  if (!in) throw FormatError(ctx + ": truncated payload");
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t get_u32(std::istream& in, const std::string& ctx) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError(ctx + ": truncated payload");
  return static_cast<std::uint32_t>(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

}  // namespace detail

inline void write_store(const EmbeddingStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write embedding store: " + path);
  out.write("EMB1", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(store.entries.size()));
  detail::put_u32(out, store.dimension);
  for (const Embedding& e : store.entries) {
    if (e.vector.size() != store.dimension) {
      throw ConfigError("write_store: entry '" + e.sample_id +
                        "' dimension mismatch");
    }
    static_assert(sizeof(float) == 4);
    for (float x : e.vector) {
      std::uint32_t bits;
      std::memcpy(&bits, &x, 4);
      detail::put_u32(out, bits);
    }
  }
  for (const Embedding& e : store.entries) {
    if (e.sample_id.size() > 0xffff) {
      throw ConfigError("write_store: sample_id too long");
    }
    detail::put_u16(out, static_cast<std::uint16_t>(e.sample_id.size()));
    out.write(e.sample_id.data(),
              static_cast<std::streamsize>(e.sample_id.size()));
  }
  if (!out) throw FormatError("write failed: " + path);
}

inline EmbeddingStore read_store(const std::string& path,
                                 bool normalize_on_load = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open embedding store: " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != "EMB1") {
    throw FormatError(path + ": bad magic, not an EMB1 store");
  }
  const std::uint32_t count = detail::get_u32(in, path);
  EmbeddingStore store;
  store.dimension = detail::get_u32(in, path);
  store.entries.resize(count);
  for (Embedding& e : store.entries) {
    e.vector.resize(store.dimension);
    for (float& x : e.vector) {
      const std::uint32_t bits = detail::get_u32(in, path);
      std::memcpy(&x, &bits, 4);
      if (!std::isfinite(x)) {
        throw FormatError(path + ": non-finite embedding value");
      }
    }
  }
  std::set<std::string> ids;
  for (Embedding& e : store.entries) {
    const std::uint16_t len = detail::get_u16(in, path);
    e.sample_id.resize(len);
    in.read(e.sample_id.data(), len);
    if (!in) throw FormatError(path + ": id count mismatch (truncated footer)");
    if (!ids.insert(e.sample_id).second) {
      throw FormatError(path + ": duplicate sample_id '" + e.sample_id + "'");
    }
  }
  for (Embedding& e : store.entries) {
    if (normalize_on_load) {
      e.vector = l2_normalize(e.vector);
      e.normalized = true;
    } else {
      e.normalized = std::abs(vector_norm(e.vector) - 1.0) <= 1e-6;
    }
  }
  return store;
}

}  // namespace uavloc
