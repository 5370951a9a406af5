#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "panolayout/error.hpp"

namespace panolayout {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

/// Pixel grid of a full equirectangular panorama (width = 2 * height).
struct ImageGrid {
  int width = 1024;
  int height = 512;

  void validate() const {
    if (width < 4 || height < 2 || width != 2 * height) {
      throw InputError("invalid panorama grid " + std::to_string(width) + "x" +
                       std::to_string(height) + " (need width = 2*height, width >= 4)");
    }
  }

  double diagonal() const { return std::hypot(double(width), double(height)); }

  static ImageGrid from_width(int width) {
    ImageGrid g{width, width / 2};
    g.validate();
    return g;
  }

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;
};

struct SphericalCoord {
  double lon = 0.0;  // [-pi, pi)
  double lat = 0.0;  // (-pi/2, pi/2)
};

/// Wraps a longitude into [-pi, pi).
inline double wrap_lon(double lon) {
  double r = std::fmod(lon + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  // fmod can land exactly on +pi after the shift for inputs like -pi - tiny.
  return r >= kPi ? r - kTwoPi : r;
}

/// Wraps a real column into [0, width).
inline double wrap_col(double col, int width) {
  double r = std::fmod(col, double(width));
  if (r < 0.0) r += width;
  return r >= width ? r - width : r;
}

inline int wrap_index(long long i, int width) {
  long long r = i % width;
  return int(r < 0 ? r + width : r);
}

/// Shortest distance between two columns on the cyclic axis.
inline double cyclic_col_distance(double a, double b, int width) {
  double d = std::fabs(wrap_col(a - b, width));
  return d > 0.5 * width ? width - d : d;
}

/// Longitude of a real-valued column, without wrapping. Pixel centres sit at u + 0.5.
inline double col_to_lon_unwrapped(double u, const ImageGrid& grid) {
  return ((u + 0.5) / grid.width - 0.5) * kTwoPi;
}

inline double col_to_lon(int u, const ImageGrid& grid) {
  if (u < 0 || u >= grid.width) {
    throw InputError("column " + std::to_string(u) + " outside [0, " +
                     std::to_string(grid.width) + ")");
  }
  return col_to_lon_unwrapped(u, grid);
}

inline double row_to_lat_unchecked(double v, const ImageGrid& grid) {
  return kHalfPi - ((v + 0.5) / grid.height) * kPi;
}

inline double row_to_lat(int v, const ImageGrid& grid) {
  if (v < 0 || v >= grid.height) {
    throw InputError("row " + std::to_string(v) + " outside [0, " +
                     std::to_string(grid.height) + ")");
  }
  return row_to_lat_unchecked(v, grid);
}

/// Real-valued column of a longitude; -pi maps to -0.5.
inline double lon_to_col(double lon, const ImageGrid& grid) {
  return (wrap_lon(lon) / kTwoPi + 0.5) * grid.width - 0.5;
}

inline double lat_to_row(double lat, const ImageGrid& grid) {
  if (!(std::fabs(lat) < kHalfPi)) {
    throw PoleError("latitude " + std::to_string(lat) + " is at or beyond a pole");
  }
  return (kHalfPi - lat) / kPi * grid.height - 0.5;
}

inline SphericalCoord pixel_to_sphere(double u, double v, const ImageGrid& grid) {
  return {wrap_lon(col_to_lon_unwrapped(u, grid)), row_to_lat_unchecked(v, grid)};
}

}  // namespace panolayout
