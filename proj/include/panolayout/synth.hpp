#pragma once

// Exact forward model: renders boundary signals and ground-truth visible
// layouts from floor polygons by brute-force ray casting. Everything here is
// deliberately slow and simple; the detection pipeline is tested against it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "panolayout/error.hpp"
#include "panolayout/geometry.hpp"
#include "panolayout/panorama.hpp"
#include "panolayout/signal.hpp"

namespace panolayout {

struct SyntheticRoom {
  std::vector<FloorPoint> floor_polygon;  // world frame, counter-clockwise
  double room_height = 3.0;
  FloorPoint camera_position;
  double camera_height = 1.6;

  void validate() const {
    if (floor_polygon.size() < 3) throw InputError("room polygon needs at least 3 vertices");
    if (!is_simple(floor_polygon)) throw InputError("room polygon is not simple");
    if (!(signed_area(floor_polygon) > 0.0)) {
      throw InputError("room polygon must be counter-clockwise");
    }
    if (!(camera_height > 0.0 && camera_height < room_height)) {
      throw InputError("need 0 < camera_height < room_height");
    }
    if (!contains(floor_polygon, camera_position)) {
      throw InputError("camera is outside the room polygon");
    }
    for (std::size_t i = 0, n = floor_polygon.size(); i < n; ++i) {
      const FloorPoint a = floor_polygon[i] - camera_position;
      const FloorPoint b = floor_polygon[(i + 1) % n] - camera_position;
      const FloorPoint e = b - a;
      const double t = std::clamp(-dot(a, e) / dot(e, e), 0.0, 1.0);
      if ((a + t * e).norm() < 1e-9) throw InputError("camera lies on a wall");
    }
  }

  /// Polygon with the camera moved to the origin.
  std::vector<FloorPoint> camera_frame_polygon() const {
    std::vector<FloorPoint> out;
    out.reserve(floor_polygon.size());
    for (const auto& p : floor_polygon) out.push_back(p - camera_position);
    return out;
  }

  CameraModel camera() const { return CameraModel{camera_height}; }
};

struct RayHit {
  double distance = 0.0;
  int edge = -1;
};

/// Nearest intersection of the ray from `origin` at angle `lon` with the
/// polygon's edges. Edges parallel to the ray are ignored.
inline std::optional<RayHit> cast_ray(std::span<const FloorPoint> poly, FloorPoint origin,
                                      double lon) {
  const FloorPoint u{std::cos(lon), std::sin(lon)};
  std::optional<RayHit> best;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const FloorPoint a = poly[i] - origin;
    const FloorPoint r = poly[(i + 1) % n] - poly[i];
    const double denom = cross(u, r);
    if (std::fabs(denom) <= 1e-14 * r.norm()) continue;
    const double t = cross(a, r) / denom;
    const double s = cross(a, u) / denom;
    if (t <= 1e-12 || s < -1e-12 || s > 1.0 + 1e-12) continue;
    if (!best || t < best->distance) best = RayHit{t, int(i)};
  }
  return best;
}

/// Distance along the ray at `lon` (from the origin) to the infinite line
/// through edge `edge`.
inline double ray_line_distance(std::span<const FloorPoint> poly, int edge, double lon) {
  const FloorPoint u{std::cos(lon), std::sin(lon)};
  const FloorPoint a = poly[std::size_t(edge)];
  const FloorPoint r = poly[(std::size_t(edge) + 1) % poly.size()] - a;
  return cross(a, r) / cross(u, r);
}

inline LayoutCorner corner_at_distance(double column, double distance, CornerKind kind,
                                       const CameraModel& cam, double room_height) {
  return {column, floor_lat_at_distance(distance, cam),
          ceil_lat_at_distance(distance, room_height, cam), kind};
}

/// Ground-truth visible layout: visible polygon vertices plus a near/far pair
/// wherever the nearest wall changes discontinuously.
inline VisibleLayout visible_truth(const SyntheticRoom& room, const ImageGrid& grid) {
  room.validate();
  grid.validate();
  const auto poly = room.camera_frame_polygon();
  const CameraModel cam = room.camera();
  const FloorPoint origin{0.0, 0.0};

  std::vector<double> angles;
  for (const auto& p : poly) angles.push_back(p.angle());
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
               angles.end());

  constexpr double kEps = 1e-7;
  std::vector<LayoutCorner> corners;
  for (double theta : angles) {
    const auto before = cast_ray(poly, origin, theta - kEps);
    const auto after = cast_ray(poly, origin, theta + kEps);
    if (!before || !after) throw GeometryError("ray escaped the room polygon");
    if (before->edge == after->edge) continue;
    const double t_before = ray_line_distance(poly, before->edge, theta);
    const double t_after = ray_line_distance(poly, after->edge, theta);
    const double column = wrap_col(lon_to_col(theta, grid), grid.width);
    if (std::fabs(t_before - t_after) <= 1e-7 * std::max(t_before, t_after)) {
      corners.push_back(corner_at_distance(column, 0.5 * (t_before + t_after),
                                           CornerKind::visible, cam, room.room_height));
    } else {
      const bool before_is_near = t_before < t_after;
      corners.push_back(corner_at_distance(
          column, t_before,
          before_is_near ? CornerKind::occlusion_near : CornerKind::occlusion_far, cam,
          room.room_height));
      corners.push_back(corner_at_distance(
          column, t_after,
          before_is_near ? CornerKind::occlusion_far : CornerKind::occlusion_near, cam,
          room.room_height));
    }
  }
  return assemble_layout(std::move(corners), grid, cam, room.room_height);
}

struct RenderOptions {
  double peak_sigma = 2.0;  // columns; <= 0 renders single-column deltas
};

struct RenderedRoom {
  BoundarySignal signal;
  VisibleLayout truth;
};

inline RenderedRoom render_signal(const SyntheticRoom& room, const ImageGrid& grid,
                                  const RenderOptions& options = {}) {
  RenderedRoom out;
  out.truth = visible_truth(room, grid);
  const auto poly = room.camera_frame_polygon();
  const double h = room.camera_height;
  const double above = room.room_height - room.camera_height;
  auto& s = out.signal;
  s.y_p.assign(std::size_t(grid.width), 0.0);
  s.y_c.resize(std::size_t(grid.width));
  s.y_f.resize(std::size_t(grid.width));
  for (int u = 0; u < grid.width; ++u) {
    const auto hit = cast_ray(poly, FloorPoint{}, col_to_lon(u, grid));
    if (!hit) throw GeometryError("ray escaped the room polygon at column " + std::to_string(u));
    s.y_f[std::size_t(u)] = -std::atan(h / hit->distance);
    s.y_c[std::size_t(u)] = std::atan(above / hit->distance);
  }
  for (const auto& c : out.truth.corners) {
    if (c.kind == CornerKind::occlusion_far) continue;
    if (options.peak_sigma <= 0.0) {
      s.y_p[std::size_t(wrap_index(std::llround(c.column), grid.width))] = 1.0;
      continue;
    }
    const int reach = int(std::ceil(6.0 * options.peak_sigma));
    const int centre = int(std::lround(c.column));
    for (int k = -reach; k <= reach; ++k) {
      const int u = wrap_index(centre + k, grid.width);
      const double d = cyclic_col_distance(u, c.column, grid.width);
      const double v = std::exp(-d * d / (2.0 * options.peak_sigma * options.peak_sigma));
      s.y_p[std::size_t(u)] = std::max(s.y_p[std::size_t(u)], v);
    }
  }
  return out;
}

/// Adds seeded zero-mean Gaussian noise to both boundary curves, clamped to
/// their valid half-planes. y_p is left untouched.
inline BoundarySignal perturb_signal(const BoundarySignal& signal, double noise_sigma,
                                     std::uint64_t seed) {
  if (noise_sigma < 0.0) throw InputError("noise sigma must be non-negative");
  BoundarySignal out = signal;
  if (noise_sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  constexpr double kMargin = 1e-6;
  for (std::size_t i = 0; i < out.y_c.size(); ++i) {
    out.y_c[i] = std::clamp(out.y_c[i] + noise(rng), kMargin, kHalfPi - kMargin);
    out.y_f[i] = std::clamp(out.y_f[i] + noise(rng), -kHalfPi + kMargin, -kMargin);
  }
  return out;
}

// --- layout rasterisation ---------------------------------------------------

/// Per-column boundaries of a layout re-rendered through the same ray caster.
/// wall[u] is the index of the floor-polygon edge seen at column u.
struct LayoutRaster {
  std::vector<double> y_c;
  std::vector<double> y_f;
  std::vector<int> wall;
};

inline LayoutRaster rasterize_layout(const VisibleLayout& layout) {
  const auto poly = layout.floor_polygon();
  const ImageGrid& grid = layout.grid;
  const double h = layout.camera.camera_height;
  const double above = layout.room_height - h;
  LayoutRaster r;
  r.y_c.resize(std::size_t(grid.width));
  r.y_f.resize(std::size_t(grid.width));
  r.wall.resize(std::size_t(grid.width));
  for (int u = 0; u < grid.width; ++u) {
    const auto hit = cast_ray(poly, FloorPoint{}, col_to_lon(u, grid));
    if (!hit) throw GeometryError("layout polygon does not surround the camera");
    r.y_f[std::size_t(u)] = -std::atan(h / hit->distance);
    // A room lower than the camera has no visible ceiling boundary; pin it to the horizon.
    r.y_c[std::size_t(u)] = above > 0.0 ? std::atan(above / hit->distance) : 0.0;
    r.wall[std::size_t(u)] = hit->edge;
  }
  return r;
}

// --- fixture families ---------------------------------------------------------

enum class RoomFamily { square, rectangle, pentagon, hexagon, l_room, t_room };

inline constexpr RoomFamily kAllFamilies[] = {RoomFamily::square,   RoomFamily::rectangle,
                                              RoomFamily::pentagon, RoomFamily::hexagon,
                                              RoomFamily::l_room,   RoomFamily::t_room};

inline const char* to_string(RoomFamily f) {
  switch (f) {
    case RoomFamily::square: return "square";
    case RoomFamily::rectangle: return "rectangle";
    case RoomFamily::pentagon: return "pentagon";
    case RoomFamily::hexagon: return "hexagon";
    case RoomFamily::l_room: return "l_room";
    case RoomFamily::t_room: return "t_room";
  }
  return "?";
}

inline RoomFamily parse_family(std::string_view name) {
  for (auto f : kAllFamilies) {
    if (name == to_string(f)) return f;
  }
  throw InputError("unknown fixture family '" + std::string(name) + "'");
}

inline std::size_t expected_occlusion_pairs(RoomFamily f) {
  switch (f) {
    case RoomFamily::l_room: return 1;
    case RoomFamily::t_room: return 2;
    default: return 0;
  }
}

namespace detail {

inline std::vector<FloorPoint> transform(std::vector<FloorPoint> poly, FloorPoint pivot,
                                         double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : poly) {
    const FloorPoint q = p - pivot;
    p = FloorPoint{c * q.x - s * q.y, s * q.x + c * q.y} + pivot;
  }
  return poly;
}

inline SyntheticRoom draw_room(RoomFamily family, std::mt19937_64& rng) {
  auto uni = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  SyntheticRoom room;
  room.camera_height = 1.6;
  room.room_height = uni(2.6, 3.2);
  switch (family) {
    case RoomFamily::square: {
      const double s = uni(3.4, 6.0);
      room.floor_polygon = {{0, 0}, {s, 0}, {s, s}, {0, s}};
      room.camera_position = {uni(1.4, s - 1.4), uni(1.4, s - 1.4)};
      break;
    }
    case RoomFamily::rectangle: {
      const double w = uni(4.5, 8.0), d = uni(3.0, 4.5);
      room.floor_polygon = {{0, 0}, {w, 0}, {w, d}, {0, d}};
      room.camera_position = {uni(1.4, w - 1.4), uni(1.4, d - 1.4)};
      break;
    }
    case RoomFamily::pentagon:
    case RoomFamily::hexagon: {
      const int n = family == RoomFamily::pentagon ? 5 : 6;
      const double jitter = family == RoomFamily::pentagon ? 0.15 : 0.2;
      for (int k = 0; k < n; ++k) {
        const double a = kTwoPi * k / n + uni(-jitter, jitter);
        const double r = uni(2.6, 4.2);
        room.floor_polygon.push_back({r * std::cos(a), r * std::sin(a)});
      }
      room.camera_position = {uni(-0.6, 0.6), uni(-0.6, 0.6)};
      break;
    }
    case RoomFamily::l_room: {
      const double a = uni(5.0, 7.0), b = uni(2.8, 3.6), c = uni(2.8, 3.6), e = uni(5.5, 7.5);
      room.floor_polygon = {{0, 0}, {a, 0}, {a, b}, {c, b}, {c, e}, {0, e}};
      room.camera_position = {uni(1.3, c - 1.3), uni(b + 0.2, b + 1.6)};
      break;
    }
    case RoomFamily::t_room: {
      const double p = uni(2.0, 3.5), q = p + uni(2.8, 3.6), w = q + uni(2.0, 3.5);
      const double s = uni(3.5, 5.0), t = uni(2.8, 3.6);
      room.floor_polygon = {{p, 0}, {q, 0}, {q, s}, {w, s}, {w, s + t}, {0, s + t}, {0, s}, {p, s}};
      room.camera_position = {uni(p + 1.3, q - 1.3), uni(1.4, s - 1.0)};
      break;
    }
  }
  room.floor_polygon = transform(room.floor_polygon, room.camera_position, uni(0.0, kTwoPi));
  return room;
}

/// Fixture quality gate: the room must render cleanly enough that detection
/// thresholds have margin (separated corners, gentle wall slopes, strong
/// occlusion jumps) and must produce the family's occlusion structure.
inline bool fixture_ok(const SyntheticRoom& room, RoomFamily family) {
  try {
    room.validate();
  } catch (const Error&) {
    return false;
  }
  const ImageGrid grid{1024, 512};
  const auto rendered = render_signal(room, grid);
  const auto& truth = rendered.truth;
  if (truth.occlusion_pair_count() != expected_occlusion_pairs(family)) return false;
  if (expected_occlusion_pairs(family) == 0 && truth.corners.size() != room.floor_polygon.size()) {
    return false;
  }
  std::vector<double> cols;
  for (const auto& c : truth.corners) {
    if (cols.empty() || cols.back() != c.column) cols.push_back(c.column);
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cyclic_col_distance(cols[i], cols[(i + 1) % cols.size()], grid.width) < 21.0) {
      return false;
    }
  }
  std::vector<double> pair_cols;
  const auto occl = truth.occlusion_edges();
  for (std::size_t i = 0; i < truth.corners.size(); ++i) {
    if (!occl[i]) continue;
    pair_cols.push_back(truth.corners[i].column);
    const auto& a = truth.corners[i];
    const auto& b = truth.corners[(i + 1) % truth.corners.size()];
    const double da = boundary_distance(a.floor_lat, 1.0), db = boundary_distance(b.floor_lat, 1.0);
    if (std::max(da, db) / std::min(da, db) < 1.4) return false;
  }
  const auto& s = rendered.signal;
  for (int u = 0; u < grid.width; ++u) {
    const int v = (u + 1) % grid.width;
    bool straddles = false;
    for (double pc : pair_cols) {
      if (cyclic_col_distance(pc, u + 0.5, grid.width) <= 1.0) straddles = true;
    }
    if (straddles) continue;
    if (std::fabs(s.y_f[std::size_t(v)] - s.y_f[std::size_t(u)]) > 0.008) return false;
    if (std::fabs(s.y_c[std::size_t(v)] - s.y_c[std::size_t(u)]) > 0.008) return false;
  }
  return true;
}

}  // namespace detail

/// Deterministic fixture room for (family, seed).
inline SyntheticRoom make_fixture(RoomFamily family, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + std::uint64_t(family) + 1);
  for (int attempt = 0; attempt < 20000; ++attempt) {
    SyntheticRoom room = detail::draw_room(family, rng);
    if (detail::fixture_ok(room, family)) return room;
  }
  throw InputError(std::string("could not generate a ") + to_string(family) + " fixture");
}

}  // namespace panolayout
