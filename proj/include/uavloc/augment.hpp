#pragma once

#include <array>
#include <cmath>

#include "uavloc/raster.hpp"

namespace uavloc {

enum class Sampling { nearest, bilinear };

struct RotationCrop {
  double theta = 0.0;  // radians, normalized to [0, 2pi)
  int out_size = 0;    // 0 = round(r * sqrt(2)), preserves scale
  Sampling sampling = Sampling::bilinear;
};

struct PointXY {
  double x = 0.0;
  double y = 0.0;
};

inline double normalize_angle(double theta) {
  const double two_pi = 2.0 * M_PI;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  return t;
}

// Corners of the largest square inscribed in the image's largest inscribed
// circle, rotated by theta. Corner k sits at angle theta + 45deg + k*90deg
// from the circle center; side length is r*sqrt(2).
inline std::array<PointXY, 4> inscribed_square_corners(int width, int height,
                                                       double theta) {
  if (width < 2 || height < 2) {
    throw ConfigError("inscribed_square_corners: image must be >= 2x2");
  }
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  const double r = std::min(width, height) / 2.0;
  std::array<PointXY, 4> corners;
  for (int k = 0; k < 4; ++k) {
    const double phi = theta + M_PI / 4.0 + k * (M_PI / 2.0);
    corners[k] = {cx + r * std::cos(phi), cy + r * std::sin(phi)};
  }
  return corners;
}

namespace detail {

inline double sample_channel(const Raster& img, double sx, double sy, int c,
                             Sampling sampling) {
  if (sampling == Sampling::nearest) {
    int x = static_cast<int>(std::floor(sx));
    int y = static_cast<int>(std::floor(sy));
    x = std::clamp(x, 0, img.width - 1);
    y = std::clamp(y, 0, img.height - 1);
    return img.at(x, y, c);
  }
  // Bilinear in pixel-center space.
  const double fx = sx - 0.5;
  const double fy = sy - 0.5;
  const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, img.width - 1);
  const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, img.height - 1);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double wx = std::clamp(fx - x0, 0.0, 1.0);
  const double wy = std::clamp(fy - y0, 0.0, 1.0);
  const double top = img.at(x0, y0, c) * (1.0 - wx) + img.at(x1, y0, c) * wx;
  const double bot = img.at(x0, y1, c) * (1.0 - wx) + img.at(x1, y1, c) * wx;
  return top * (1.0 - wy) + bot * wy;
}

}  // namespace detail

// Resamples the theta-rotated inscribed square into an axis-aligned
// out_size x out_size raster. The source quad is a square, so the mapping
// is a similarity transform (rotation + uniform scale about the circle
// center); every sampled source coordinate stays inside the inscribed
// circle.
inline Raster rotated_crop(const Raster& img, const RotationCrop& cfg) {
  if (img.width < 2 || img.height < 2) {
    throw ConfigError("rotated_crop: image must be >= 2x2");
  }
  const double theta = normalize_angle(cfg.theta);
  const double cx = img.width / 2.0;
  const double cy = img.height / 2.0;
  const double r = std::min(img.width, img.height) / 2.0;
  const double side = r * std::sqrt(2.0);
  const int n = cfg.out_size > 0
                    ? cfg.out_size
                    : static_cast<int>(std::lround(side));
  const double scale = side / n;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);

  Raster out = Raster::make(n, n, img.channels);
  for (int v = 0; v < n; ++v) {
    const double oy = (v + 0.5 - n / 2.0) * scale;
    for (int u = 0; u < n; ++u) {
      const double ox = (u + 0.5 - n / 2.0) * scale;
      const double sx = cx + cos_t * ox - sin_t * oy;
      const double sy = cy + sin_t * ox + cos_t * oy;
      for (int c = 0; c < img.channels; ++c) {
        const double val = detail::sample_channel(img, sx, sy, c, cfg.sampling);
        out.at(u, v, c) =
            static_cast<std::uint8_t>(std::clamp(std::lround(val), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace uavloc
