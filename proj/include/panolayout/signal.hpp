#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "panolayout/error.hpp"
#include "panolayout/panorama.hpp"

namespace panolayout {

enum class Boundary { ceiling, floor };

/// Per-column network output: corner probability plus ceiling-wall and
/// floor-wall boundary latitudes (radians).
struct BoundarySignal {
  std::vector<double> y_p;
  std::vector<double> y_c;
  std::vector<double> y_f;

  int width() const { return int(y_p.size()); }
  ImageGrid grid() const { return ImageGrid::from_width(width()); }

  const std::vector<double>& boundary(Boundary b) const {
    return b == Boundary::ceiling ? y_c : y_f;
  }

  void validate() const {
    grid();
    if (y_c.size() != y_p.size() || y_f.size() != y_p.size()) {
      throw InputError("boundary signal arrays differ in length");
    }
    for (std::size_t i = 0; i < y_p.size(); ++i) {
      if (!(y_p[i] >= 0.0 && y_p[i] <= 1.0)) {
        throw InputError("y_p out of [0,1] at column " + std::to_string(i));
      }
      if (!(y_c[i] > 0.0 && y_c[i] < kHalfPi)) {
        throw InputError("y_c out of (0,pi/2) at column " + std::to_string(i));
      }
      if (!(y_f[i] < 0.0 && y_f[i] > -kHalfPi)) {
        throw InputError("y_f out of (-pi/2,0) at column " + std::to_string(i));
      }
    }
  }

  /// Cyclic shift: column i moves to i + shift.
  BoundarySignal rotated(int shift) const {
    BoundarySignal out = *this;
    const int w = width();
    for (int i = 0; i < w; ++i) {
      const int j = wrap_index(i + shift, w);
      out.y_p[j] = y_p[i];
      out.y_c[j] = y_c[i];
      out.y_f[j] = y_f[i];
    }
    return out;
  }

  friend bool operator==(const BoundarySignal&, const BoundarySignal&) = default;
};

}  // namespace panolayout
