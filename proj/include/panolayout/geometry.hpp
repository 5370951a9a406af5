#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "panolayout/error.hpp"
#include "panolayout/panorama.hpp"
#include "panolayout/signal.hpp"

namespace panolayout {

struct CameraModel {
  double camera_height = 1.6;  // metres above the floor

  void validate() const {
    if (!(camera_height > 0.0) || !std::isfinite(camera_height)) {
      throw GeometryError("camera height must be positive");
    }
  }
};

/// Point on the floor plane, camera at the origin. x points toward lon = 0,
/// y toward lon = +pi/2.
struct FloorPoint {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
  double angle() const { return std::atan2(y, x); }

  friend FloorPoint operator+(FloorPoint a, FloorPoint b) { return {a.x + b.x, a.y + b.y}; }
  friend FloorPoint operator-(FloorPoint a, FloorPoint b) { return {a.x - b.x, a.y - b.y}; }
  friend FloorPoint operator*(double s, FloorPoint a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const FloorPoint&, const FloorPoint&) = default;
};

inline double cross(FloorPoint a, FloorPoint b) { return a.x * b.y - a.y * b.x; }
inline double dot(FloorPoint a, FloorPoint b) { return a.x * b.x + a.y * b.y; }

enum class CornerKind { visible, occlusion_near, occlusion_far };

inline const char* to_string(CornerKind k) {
  switch (k) {
    case CornerKind::visible: return "visible";
    case CornerKind::occlusion_near: return "occlusion_near";
    case CornerKind::occlusion_far: return "occlusion_far";
  }
  return "?";
}

inline bool is_occlusion(CornerKind k) { return k != CornerKind::visible; }

struct LayoutCorner {
  double column = 0.0;     // real-valued, [0, width)
  double floor_lat = 0.0;  // < 0
  double ceil_lat = 0.0;   // > 0
  CornerKind kind = CornerKind::visible;

  friend bool operator==(const LayoutCorner&, const LayoutCorner&) = default;
};

/// Horizontal distance to a boundary point seen at `lat` from `height` above
/// (floor) or below (ceiling) it.
inline double boundary_distance(double lat, double height) {
  return height / std::tan(std::fabs(lat));
}

inline double floor_lat_at_distance(double distance, const CameraModel& cam) {
  return -std::atan(cam.camera_height / distance);
}

inline double ceil_lat_at_distance(double distance, double room_height, const CameraModel& cam) {
  return std::atan((room_height - cam.camera_height) / distance);
}

inline FloorPoint floor_point(double lon, double floor_lat, const CameraModel& cam) {
  if (!(floor_lat < 0.0)) {
    throw GeometryError("floor boundary at or above the horizon (lat " +
                        std::to_string(floor_lat) + ")");
  }
  const double d = boundary_distance(floor_lat, cam.camera_height);
  return {d * std::cos(lon), d * std::sin(lon)};
}

/// Per-column horizontal camera-to-wall distance from one boundary curve.
inline std::vector<double> wall_distance_profile(std::span<const double> lats, Boundary which,
                                                 const CameraModel& cam, double room_height) {
  const double height =
      which == Boundary::floor ? cam.camera_height : room_height - cam.camera_height;
  if (!(height > 0.0)) {
    throw GeometryError("ceiling distance needs room_height > camera_height");
  }
  std::vector<double> d(lats.size());
  for (std::size_t i = 0; i < lats.size(); ++i) {
    const double lat = lats[i];
    const bool ok = which == Boundary::floor ? (lat < 0.0 && lat > -kHalfPi)
                                             : (lat > 0.0 && lat < kHalfPi);
    if (!ok) {
      throw GeometryError(std::string(which == Boundary::floor ? "floor" : "ceiling") +
                          " latitude on the wrong side of the horizon at column " +
                          std::to_string(i));
    }
    d[i] = boundary_distance(lat, height);
  }
  return d;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw EstimationError("median of empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  }
  return m;
}

/// Flat floor and ceiling: camera height plus the median over columns of the
/// ceiling height above the camera implied by each column's floor distance.
inline double estimate_room_height(const BoundarySignal& signal, const CameraModel& cam) {
  cam.validate();
  std::vector<double> above;
  above.reserve(signal.y_f.size());
  const std::size_t n = std::min(signal.y_f.size(), signal.y_c.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double f = signal.y_f[i];
    const double c = signal.y_c[i];
    if (!(f < 0.0 && f > -kHalfPi && c > 0.0 && c < kHalfPi)) continue;
    above.push_back(boundary_distance(f, cam.camera_height) * std::tan(c));
  }
  if (above.size() < 8) {
    throw EstimationError("room height needs at least 8 valid columns, got " +
                          std::to_string(above.size()));
  }
  return cam.camera_height + median(std::move(above));
}

// --- polygons -------------------------------------------------------------

inline double signed_area(std::span<const FloorPoint> poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    a += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * a;
}

inline bool segments_intersect(FloorPoint p1, FloorPoint p2, FloorPoint q1, FloorPoint q2) {
  auto orient = [](FloorPoint a, FloorPoint b, FloorPoint c) {
    const double v = cross(b - a, c - a);
    const double scale = std::max({1.0, (b - a).norm() * (c - a).norm()});
    return std::fabs(v) <= 1e-12 * scale ? 0 : (v > 0 ? 1 : -1);
  };
  auto on_segment = [](FloorPoint a, FloorPoint b, FloorPoint p) {
    return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

/// True when no two non-adjacent edges touch and no vertex repeats.
inline bool is_simple(std::span<const FloorPoint> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((poly[(i + 1) % n] - poly[i]).norm() <= 1e-12) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

inline bool contains(std::span<const FloorPoint> poly, FloorPoint p) {
  bool inside = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const FloorPoint a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

// --- layouts --------------------------------------------------------------

/// Splits a cyclic corner sequence into units: lone visible corners and
/// adjacent occlusion pairs. Returns the index of each unit's first corner and
/// its size, or nullopt when an occlusion corner has no partner.
inline std::optional<std::vector<std::pair<std::size_t, std::size_t>>> occlusion_units(
    std::span<const LayoutCorner> corners) {
  const std::size_t n = corners.size();
  if (n == 0) return std::vector<std::pair<std::size_t, std::size_t>>{};
  auto complementary = [](CornerKind a, CornerKind b) {
    return (a == CornerKind::occlusion_near && b == CornerKind::occlusion_far) ||
           (a == CornerKind::occlusion_far && b == CornerKind::occlusion_near);
  };
  std::size_t start = 0;
  const bool any_visible = std::any_of(corners.begin(), corners.end(),
                                       [](const auto& c) { return !is_occlusion(c.kind); });
  if (any_visible) {
    while (is_occlusion(corners[start].kind)) ++start;
  }
  for (std::size_t attempt = 0; attempt < (any_visible ? 1u : 2u); ++attempt) {
    std::vector<std::pair<std::size_t, std::size_t>> units;
    bool ok = true;
    for (std::size_t k = 0; k < n && ok;) {
      const std::size_t i = (start + attempt + k) % n;
      if (!is_occlusion(corners[i].kind)) {
        units.emplace_back(i, 1);
        k += 1;
      } else if (k + 1 < n && complementary(corners[i].kind, corners[(i + 1) % n].kind)) {
        units.emplace_back(i, 2);
        k += 2;
      } else {
        ok = false;
      }
    }
    if (ok) return units;
  }
  return std::nullopt;
}

/// Visible room layout: corners in increasing column order around the camera;
/// each occlusion pair shares one column and is joined by an edge along the
/// camera ray.
struct VisibleLayout {
  std::vector<LayoutCorner> corners;
  CameraModel camera;
  double room_height = 3.2;
  ImageGrid grid;

  FloorPoint corner_point(std::size_t i) const {
    const auto& c = corners.at(i);
    return floor_point(wrap_lon(col_to_lon_unwrapped(c.column, grid)), c.floor_lat, camera);
  }

  std::vector<FloorPoint> floor_polygon() const {
    std::vector<FloorPoint> poly;
    poly.reserve(corners.size());
    for (std::size_t i = 0; i < corners.size(); ++i) poly.push_back(corner_point(i));
    return poly;
  }

  /// occlusion_edge[i] is true when edge i -> i+1 joins an occlusion pair.
  std::vector<bool> occlusion_edges() const {
    std::vector<bool> out(corners.size(), false);
    if (auto units = occlusion_units(corners)) {
      for (auto [first, size] : *units) {
        if (size == 2) out[first] = true;
      }
    }
    return out;
  }

  std::size_t occlusion_pair_count() const {
    const auto e = occlusion_edges();
    return std::size_t(std::count(e.begin(), e.end(), true));
  }

  friend bool operator==(const VisibleLayout& a, const VisibleLayout& b) {
    return a.corners == b.corners && a.camera.camera_height == b.camera.camera_height &&
           a.room_height == b.room_height && a.grid == b.grid;
  }
};

/// Cyclic mean of two columns (the midpoint along the shorter arc).
inline double cyclic_mid_column(double a, double b, int width) {
  double d = wrap_col(b - a, width);
  if (d > 0.5 * width) d -= width;
  return wrap_col(a + 0.5 * d, width);
}

/// Builds a layout from detected corners: snaps occlusion pairs onto a shared
/// column, orders corners around the camera, and rejects polygons that are
/// not simple or do not enclose the camera.
inline VisibleLayout assemble_layout(std::vector<LayoutCorner> corners, const ImageGrid& grid,
                                     const CameraModel& cam, double room_height) {
  grid.validate();
  cam.validate();
  if (!(room_height > 0.0) || !std::isfinite(room_height)) {
    throw GeometryError("room height must be positive");
  }
  if (corners.size() < 3) throw AssemblyError("a layout needs at least 3 corners");
  for (auto& c : corners) {
    if (!(c.floor_lat < 0.0 && c.ceil_lat > 0.0)) {
      throw GeometryError("corner at column " + std::to_string(c.column) +
                          " violates floor_lat < 0 < ceil_lat");
    }
    if (!std::isfinite(c.column)) throw AssemblyError("non-finite corner column");
    c.column = wrap_col(c.column, grid.width);
  }

  auto units = occlusion_units(corners);
  if (!units) throw AssemblyError("occlusion corner without an adjacent partner");

  struct Unit {
    double column;
    std::vector<LayoutCorner> members;
  };
  std::vector<Unit> ordered;
  for (auto [first, size] : *units) {
    Unit u;
    for (std::size_t k = 0; k < size; ++k) u.members.push_back(corners[(first + k) % corners.size()]);
    if (size == 2) {
      auto& a = u.members[0];
      auto& b = u.members[1];
      if (std::fabs(a.column - b.column) > 1e-9) {
        const double mid = cyclic_mid_column(a.column, b.column, grid.width);
        a.column = b.column = mid;
      }
      const auto& near = a.kind == CornerKind::occlusion_near ? a : b;
      const auto& far = a.kind == CornerKind::occlusion_near ? b : a;
      if (!(boundary_distance(near.floor_lat, 1.0) < boundary_distance(far.floor_lat, 1.0))) {
        throw AssemblyError("occlusion pair at column " + std::to_string(a.column) +
                            " has its near corner behind its far corner");
      }
    }
    u.column = u.members.front().column;
    ordered.push_back(std::move(u));
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Unit& x, const Unit& y) { return x.column < y.column; });

  VisibleLayout layout;
  layout.camera = cam;
  layout.room_height = room_height;
  layout.grid = grid;
  for (auto& u : ordered) {
    for (auto& c : u.members) layout.corners.push_back(c);
  }
  for (std::size_t i = 0; i + 1 < layout.corners.size(); ++i) {
    const double a = layout.corners[i].column, b = layout.corners[i + 1].column;
    const bool same_pair = a == b && is_occlusion(layout.corners[i].kind) &&
                           is_occlusion(layout.corners[i + 1].kind);
    if (!(a < b) && !same_pair) {
      throw AssemblyError("two corners share column " + std::to_string(a));
    }
  }

  const auto poly = layout.floor_polygon();
  if (!is_simple(poly)) throw AssemblyError("floor polygon is self-intersecting");
  if (!(signed_area(poly) > 0.0) || !contains(poly, FloorPoint{0.0, 0.0})) {
    throw AssemblyError("floor polygon does not enclose the camera");
  }
  return layout;
}

inline VisibleLayout assemble_layout(std::vector<LayoutCorner> corners,
                                     const BoundarySignal& signal, const CameraModel& cam) {
  return assemble_layout(std::move(corners), signal.grid(), cam,
                         estimate_room_height(signal, cam));
}

}  // namespace panolayout
