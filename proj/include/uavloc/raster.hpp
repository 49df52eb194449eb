#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "uavloc/error.hpp"

namespace uavloc {

// 8-bit raster, row-major, interleaved channels (1 = gray, 3 = RGB).
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y, int c) const {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  std::uint8_t& at(int x, int y, int c) {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }

  bool empty() const { return width <= 0 || height <= 0 || pixels.empty(); }

  static Raster make(int width, int height, int channels,
                     std::uint8_t fill = 0) {
    Raster r;
    r.width = width;
    r.height = height;
    r.channels = channels;
    r.pixels.assign(
        static_cast<std::size_t>(width) * height * channels, fill);
    return r;
  }
};

// Exact sub-raster copy; samples are bit-identical to the source.
inline Raster crop(const Raster& src, int offset_x, int offset_y,
                   int window_px) {
  if (offset_x < 0 || offset_y < 0 || window_px < 1 ||
      offset_x + window_px > src.width || offset_y + window_px > src.height) {
    throw ConfigError("crop: window outside raster bounds");
  }
  Raster out = Raster::make(window_px, window_px, src.channels);
  const std::size_t row_bytes =
      static_cast<std::size_t>(window_px) * src.channels;
  for (int y = 0; y < window_px; ++y) {
    const std::uint8_t* s =
        &src.pixels[static_cast<std::size_t>(((offset_y + y) * src.width +
                                              offset_x)) *
                    src.channels];
    std::uint8_t* d = &out.pixels[static_cast<std::size_t>(y) * row_bytes];
    std::copy(s, s + row_bytes, d);
  }
  return out;
}

namespace detail {

inline int read_pnm_token(std::istream& in) {
  // Skips whitespace and '#' comments per the PNM grammar.
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}

}  // namespace detail

// Binary PGM (P5, 1 channel) / PPM (P6, 3 channels) reader.
inline Raster read_raster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open raster: " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  int channels = 0;
  if (magic[0] == 'P' && magic[1] == '5') channels = 1;
  else if (magic[0] == 'P' && magic[1] == '6') channels = 3;
  else throw FormatError("not a binary PGM/PPM file: " + path);

  Raster r;
  r.channels = channels;
  r.width = detail::read_pnm_token(in);
  r.height = detail::read_pnm_token(in);
  const int maxval = detail::read_pnm_token(in);
  if (r.width < 1 || r.height < 1 || maxval != 255) {
    throw FormatError("unsupported raster header in " + path);
  }
  in.get();  // single whitespace after maxval
  const std::size_t n =
      static_cast<std::size_t>(r.width) * r.height * channels;
  r.pixels.resize(n);
  in.read(reinterpret_cast<char*>(r.pixels.data()),
          static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError("truncated raster payload in " + path);
  }
  return r;
}

inline void write_raster(const Raster& r, const std::string& path) {
  if (r.channels != 1 && r.channels != 3) {
    throw ConfigError("write_raster: only 1 or 3 channels supported");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write raster: " + path);
  out << (r.channels == 1 ? "P5" : "P6") << "\n"
      << r.width << " " << r.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(r.pixels.data()),
            static_cast<std::streamsize>(r.pixels.size()));
  if (!out) throw FormatError("write failed: " + path);
}

inline std::string raster_extension(int channels) {
  return channels == 3 ? ".ppm" : ".pgm";
}

}  // namespace uavloc
