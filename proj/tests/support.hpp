#pragma once

// Shared fixtures and brute-force reference implementations for the tests.
// The references are deliberately naive: quadratic loops, no shortcuts.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "panolayout/panolayout.hpp"

namespace pltest {

using namespace panolayout;

struct Fixture {
  RoomFamily family;
  std::uint64_t seed;
  SyntheticRoom room;
  RenderedRoom rendered;
};

/// Rendered fixture, cached per (family, seed, width).
inline const Fixture& fixture(RoomFamily family, std::uint64_t seed, int width = 1024) {
  static std::map<std::tuple<int, std::uint64_t, int>, Fixture> cache;
  const auto key = std::make_tuple(int(family), seed, width);
  auto it = cache.find(key);
  if (it == cache.end()) {
    Fixture f{family, seed, make_fixture(family, seed), {}};
    f.rendered = render_signal(f.room, ImageGrid::from_width(width));
    it = cache.emplace(key, std::move(f)).first;
  }
  return it->second;
}

inline VisibleLayout box_layout(double half_x, double half_y, const ImageGrid& grid = {},
                                double room_height = 3.2, double camera_height = 1.6) {
  SyntheticRoom room;
  room.floor_polygon = {{-half_x, -half_y}, {half_x, -half_y}, {half_x, half_y}, {-half_x, half_y}};
  room.room_height = room_height;
  room.camera_height = camera_height;
  return visible_truth(room, grid);
}

inline BoundarySignal constant_signal(int width, double y_c, double y_f, double y_p = 0.0) {
  BoundarySignal s;
  s.y_p.assign(std::size_t(width), y_p);
  s.y_c.assign(std::size_t(width), y_c);
  s.y_f.assign(std::size_t(width), y_f);
  return s;
}

// --- brute-force references ---------------------------------------------------------------

/// Point-in-polygon by winding number (independent of the even-odd scanline).
inline bool winding_inside(const std::vector<FloorPoint>& poly, FloorPoint p) {
  int wn = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const FloorPoint a = poly[i], b = poly[(i + 1) % poly.size()];
    const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else if (b.y <= p.y && side < 0) {
      --wn;
    }
  }
  return wn != 0;
}

/// IoU by per-pixel winding tests on an n x n grid over the joint box.
inline double brute_iou(const std::vector<FloorPoint>& a, const std::vector<FloorPoint>& b, int n) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto* poly : {&a, &b}) {
    for (const auto& p : *poly) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  long inter = 0, uni = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const FloorPoint p{xmin + (c + 0.5) * (xmax - xmin) / n, ymin + (r + 0.5) * (ymax - ymin) / n};
      const bool ia = winding_inside(a, p), ib = winding_inside(b, p);
      inter += ia && ib;
      uni += ia || ib;
    }
  }
  return double(inter) / double(uni);
}

/// Exhaustive minimum-cost assignment (small sets only) for corner error.
inline double brute_corner_error(const std::vector<ImagePoint>& pred, const std::vector<ImagePoint>& gt,
                                 const ImageGrid& grid) {
  const bool swap = pred.size() > gt.size();
  const auto& small = swap ? gt : pred;
  const auto& large = swap ? pred : gt;
  std::vector<int> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < small.size(); ++i) {
      s += pixel_distance(small[i], large[std::size_t(perm[i])], grid);
    }
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double diag = grid.diagonal();
  best += double(large.size() - small.size()) * 0.1 * diag;
  return best / double(large.size()) / diag;
}

/// Pixel-set F-score by exhaustive nearest-pixel search.
inline double brute_wireframe_f(const WireframePixels& pred, const WireframePixels& gt) {
  auto flatten = [](const WireframePixels& px) {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < int(px.size()); ++u) {
      for (int r : px[std::size_t(u)]) out.emplace_back(u, r);
    }
    return out;
  };
  const auto p = flatten(pred), g = flatten(gt);
  const int w = int(pred.size());
  auto nearest = [w](std::pair<int, int> a, const std::vector<std::pair<int, int>>& set) {
    double best = 1e300;
    for (const auto& b : set) {
      int dx = std::abs(a.first - b.first);
      dx = std::min(dx, w - dx);
      const double dy = a.second - b.second;
      best = std::min(best, std::sqrt(double(dx) * dx + dy * dy));
    }
    return best;
  };
  std::vector<double> dp, dg;
  for (const auto& a : p) dp.push_back(nearest(a, g));
  for (const auto& a : g) dg.push_back(nearest(a, p));
  double sum = 0.0;
  for (double t : {5.0, 10.0, 20.0}) {
    const double prec = double(std::count_if(dp.begin(), dp.end(), [t](double d) { return d <= t; })) / dp.size();
    const double rec = double(std::count_if(dg.begin(), dg.end(), [t](double d) { return d <= t; })) / dg.size();
    sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
  }
  return sum / 3.0;
}

}  // namespace pltest
