#pragma once

// Layout evaluation: floor-plan IoU (2D and 3D), corner error, pixel error,
// and junction / wireframe / plane F-scores.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "panolayout/error.hpp"
#include "panolayout/geometry.hpp"
#include "panolayout/panorama.hpp"
#include "panolayout/synth.hpp"

namespace panolayout {

// --- floor-plan IoU -----------------------------------------------------------

struct PolygonOverlap {
  double area_a = 0.0;
  double area_b = 0.0;
  double intersection = 0.0;

  double iou() const { return intersection / (area_a + area_b - intersection); }
};

namespace detail {

using PixelRange = std::pair<long, long>;  // inclusive pixel-index range

/// Pixel-centre spans of one polygon on the scanline at height y (even-odd rule).
inline void scanline_ranges(std::span<const FloorPoint> poly, double y, double x0, double dx,
                            std::vector<double>& xs, std::vector<PixelRange>& out) {
  xs.clear();
  out.clear();
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const FloorPoint a = poly[i], b = poly[j];
    if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
  }
  std::sort(xs.begin(), xs.end());
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
    // Pixel c is inside when xs[k] < x0 + (c + 0.5) dx < xs[k+1].
    const long lo = long(std::floor((xs[k] - x0) / dx - 0.5)) + 1;
    const long hi = long(std::ceil((xs[k + 1] - x0) / dx - 0.5)) - 1;
    if (hi >= lo) out.emplace_back(lo, hi);
  }
}

inline long range_count(const std::vector<PixelRange>& r) {
  long n = 0;
  for (auto [lo, hi] : r) n += hi - lo + 1;
  return n;
}

inline long range_intersection(const std::vector<PixelRange>& a, const std::vector<PixelRange>& b) {
  long n = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const long lo = std::max(a[i].first, b[j].first);
    const long hi = std::min(a[i].second, b[j].second);
    if (hi >= lo) n += hi - lo + 1;
    (a[i].second < b[j].second) ? ++i : ++j;
  }
  return n;
}

}  // namespace detail

/// Areas of A, B and A∩B by pixel-centre containment on a resolution x
/// resolution grid spanning the joint bounding box.
inline PolygonOverlap overlap_areas(std::span<const FloorPoint> a, std::span<const FloorPoint> b,
                                    int resolution = 2048) {
  if (resolution < 1) throw InputError("raster resolution must be positive");
  if (a.size() < 3 || b.size() < 3 || !(std::fabs(signed_area(a)) > 0.0) ||
      !(std::fabs(signed_area(b)) > 0.0)) {
    throw MetricError("IoU of a degenerate (zero-area) polygon");
  }
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (auto poly : {a, b}) {
    for (const auto& p : poly) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  const double dx = (xmax - xmin) / resolution, dy = (ymax - ymin) / resolution;
  std::vector<double> xs;
  std::vector<detail::PixelRange> ra, rb;
  long na = 0, nb = 0, ni = 0;
  for (int r = 0; r < resolution; ++r) {
    const double y = ymin + (r + 0.5) * dy;
    detail::scanline_ranges(a, y, xmin, dx, xs, ra);
    detail::scanline_ranges(b, y, xmin, dx, xs, rb);
    na += detail::range_count(ra);
    nb += detail::range_count(rb);
    ni += detail::range_intersection(ra, rb);
  }
  if (na == 0 || nb == 0) throw MetricError("polygon too thin for the IoU raster");
  const double cell = dx * dy;
  return {na * cell, nb * cell, ni * cell};
}

inline double iou_2d(std::span<const FloorPoint> a, std::span<const FloorPoint> b,
                     int resolution = 2048) {
  return overlap_areas(a, b, resolution).iou();
}

/// Extruded floor plans sharing the floor plane z = 0.
inline double iou_3d(std::span<const FloorPoint> a, double height_a, std::span<const FloorPoint> b,
                     double height_b, int resolution = 2048) {
  if (!(height_a > 0.0) || !(height_b > 0.0)) throw MetricError("room height must be positive");
  const auto o = overlap_areas(a, b, resolution);
  const double inter = o.intersection * std::min(height_a, height_b);
  return inter / (o.area_a * height_a + o.area_b * height_b - inter);
}

inline double iou_2d(const VisibleLayout& a, const VisibleLayout& b, int resolution = 2048) {
  return iou_2d(a.floor_polygon(), b.floor_polygon(), resolution);
}

inline double iou_3d(const VisibleLayout& a, const VisibleLayout& b, int resolution = 2048) {
  return iou_3d(a.floor_polygon(), a.room_height, b.floor_polygon(), b.room_height, resolution);
}

// --- corners ------------------------------------------------------------------------

struct ImagePoint {
  double x = 0.0;  // column
  double y = 0.0;  // row
};

/// Euclidean pixel distance with the column axis treated as cyclic.
inline double pixel_distance(ImagePoint a, ImagePoint b, const ImageGrid& grid) {
  return std::hypot(cyclic_col_distance(a.x, b.x, grid.width), a.y - b.y);
}

/// Ceiling and floor image points of every layout corner.
inline std::vector<ImagePoint> layout_image_corners(const VisibleLayout& layout) {
  std::vector<ImagePoint> pts;
  for (const auto& c : layout.corners) {
    pts.push_back({c.column, lat_to_row(c.ceil_lat, layout.grid)});
    pts.push_back({c.column, lat_to_row(c.floor_lat, layout.grid)});
  }
  return pts;
}

/// Image points of every vertex of a camera-frame floor polygon, hidden or not.
inline std::vector<ImagePoint> polygon_image_corners(std::span<const FloorPoint> poly,
                                                     const CameraModel& cam, double room_height,
                                                     const ImageGrid& grid) {
  std::vector<ImagePoint> pts;
  for (const auto& p : poly) {
    const double col = wrap_col(lon_to_col(p.angle(), grid), grid.width);
    const double d = p.norm();
    pts.push_back({col, lat_to_row(ceil_lat_at_distance(d, room_height, cam), grid)});
    pts.push_back({col, lat_to_row(floor_lat_at_distance(d, cam), grid)});
  }
  return pts;
}

enum class CornerMatching { hungarian, greedy };

inline CornerMatching parse_corner_matching(std::string_view s) {
  if (s == "hungarian") return CornerMatching::hungarian;
  if (s == "greedy") return CornerMatching::greedy;
  throw InputError("unknown corner matching '" + std::string(s) + "'");
}

namespace detail {

/// Minimum-cost perfect assignment on a square cost matrix (row-major).
/// Returns the column assigned to each row.
inline std::vector<int> hungarian(const std::vector<double>& cost, int n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(std::size_t(n) + 1, 0.0), v(std::size_t(n) + 1, 0.0);
  std::vector<int> p(std::size_t(n) + 1, 0), way(std::size_t(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(std::size_t(n) + 1, kInf);
    std::vector<char> used(std::size_t(n) + 1, 0);
    do {
      used[std::size_t(j0)] = 1;
      const int i0 = p[std::size_t(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[std::size_t(j)]) continue;
        const double cur = cost[std::size_t(i0 - 1) * std::size_t(n) + std::size_t(j - 1)] -
                           u[std::size_t(i0)] - v[std::size_t(j)];
        if (cur < minv[std::size_t(j)]) {
          minv[std::size_t(j)] = cur;
          way[std::size_t(j)] = j0;
        }
        if (minv[std::size_t(j)] < delta) {
          delta = minv[std::size_t(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[std::size_t(j)]) {
          u[std::size_t(p[std::size_t(j)])] += delta;
          v[std::size_t(j)] -= delta;
        } else {
          minv[std::size_t(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[std::size_t(j0)] != 0);
    do {
      const int j1 = way[std::size_t(j0)];
      p[std::size_t(j0)] = p[std::size_t(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(std::size_t(n), -1);
  for (int j = 1; j <= n; ++j) assignment[std::size_t(p[std::size_t(j)] - 1)] = j - 1;
  return assignment;
}

/// Greedy one-to-one matching in ascending distance, pairs beyond max_dist excluded.
inline std::vector<std::pair<int, int>> greedy_match(std::span<const ImagePoint> a,
                                                     std::span<const ImagePoint> b,
                                                     const ImageGrid& grid, double max_dist) {
  struct Cand {
    double d;
    int i, j;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = pixel_distance(a[i], b[j], grid);
      if (d <= max_dist) cands.push_back({d, int(i), int(j)});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    return x.d != y.d ? x.d < y.d : (x.i != y.i ? x.i < y.i : x.j < y.j);
  });
  std::vector<char> ua(a.size(), 0), ub(b.size(), 0);
  std::vector<std::pair<int, int>> out;
  for (const auto& c : cands) {
    if (ua[std::size_t(c.i)] || ub[std::size_t(c.j)]) continue;
    ua[std::size_t(c.i)] = ub[std::size_t(c.j)] = 1;
    out.emplace_back(c.i, c.j);
  }
  return out;
}

}  // namespace detail

inline constexpr double kUnmatchedCornerPenalty = 0.1;  // fraction of the image diagonal

/// Mean corner distance over a one-to-one matching, as a fraction of the
/// image diagonal. Each corner left unmatched by a cardinality mismatch is
/// charged 0.1 x diagonal.
inline double corner_error(std::span<const ImagePoint> pred, std::span<const ImagePoint> gt,
                           const ImageGrid& grid,
                           CornerMatching matching = CornerMatching::hungarian) {
  if (pred.empty() || gt.empty()) throw MetricError("corner error of an empty corner set");
  const double diag = grid.diagonal();
  double sum = 0.0;
  std::size_t matched = 0;
  if (matching == CornerMatching::hungarian) {
    const int n = int(std::max(pred.size(), gt.size()));
    std::vector<double> cost(std::size_t(n) * std::size_t(n), 0.0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      for (std::size_t j = 0; j < gt.size(); ++j) {
        cost[i * std::size_t(n) + j] = pixel_distance(pred[i], gt[j], grid);
      }
    }
    const auto assign = detail::hungarian(cost, n);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const int j = assign[i];
      if (j >= 0 && std::size_t(j) < gt.size()) {
        sum += pixel_distance(pred[i], gt[std::size_t(j)], grid);
        ++matched;
      }
    }
  } else {
    for (auto [i, j] : detail::greedy_match(pred, gt, grid, std::numeric_limits<double>::infinity())) {
      sum += pixel_distance(pred[std::size_t(i)], gt[std::size_t(j)], grid);
      ++matched;
    }
  }
  const std::size_t terms = std::max(pred.size(), gt.size());
  sum += double(terms - matched) * kUnmatchedCornerPenalty * diag;
  return sum / double(terms) / diag;
}

// --- F-scores ---------------------------------------------------------------------------

inline constexpr std::array<double, 3> kPixelThresholds = {5.0, 10.0, 20.0};

inline double f_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

/// Mean over the 5/10/20-pixel thresholds of the corner-matching F-score.
inline double junction_f(std::span<const ImagePoint> pred, std::span<const ImagePoint> gt,
                         const ImageGrid& grid) {
  if (pred.empty() && gt.empty()) return 1.0;
  if (pred.empty() || gt.empty()) return 0.0;
  double sum = 0.0;
  for (double t : kPixelThresholds) {
    const double m = double(detail::greedy_match(pred, gt, grid, t).size());
    sum += f_score(m / double(pred.size()), m / double(gt.size()));
  }
  return sum / double(kPixelThresholds.size());
}

// --- semantic masks ----------------------------------------------------------------------

enum class Semantic : std::uint8_t { ceiling = 0, wall = 1, floor = 2 };

struct SemanticMask {
  ImageGrid grid;
  std::vector<Semantic> labels;  // row-major, height x width

  Semantic at(int col, int row) const {
    return labels[std::size_t(row) * std::size_t(grid.width) + std::size_t(col)];
  }
};

/// Wall rows of one column are [ceiling_end, floor_begin); rows above are
/// ceiling (lat > y_c), rows below are floor (lat < y_f).
struct ColumnSpan {
  int ceiling_end = 0;
  int floor_begin = 0;
};

inline ColumnSpan column_span(double y_c, double y_f, const ImageGrid& grid) {
  const double h = grid.height;
  // lat(v) > y_c  <=>  v < (pi/2 - y_c) h / pi - 0.5
  const double xc = (kHalfPi - y_c) * h / kPi - 0.5;
  const double xf = (kHalfPi - y_f) * h / kPi - 0.5;
  ColumnSpan s;
  s.ceiling_end = int(std::clamp(std::ceil(xc), 0.0, h));
  s.floor_begin = int(std::clamp(std::floor(xf) + 1.0, 0.0, h));
  s.floor_begin = std::max(s.floor_begin, s.ceiling_end);
  return s;
}

inline SemanticMask render_semantic(std::span<const double> y_c, std::span<const double> y_f,
                                    const ImageGrid& grid) {
  if (int(y_c.size()) != grid.width || int(y_f.size()) != grid.width) {
    throw InputError("boundary length does not match the grid width");
  }
  SemanticMask m{grid, std::vector<Semantic>(std::size_t(grid.width) * std::size_t(grid.height))};
  for (int u = 0; u < grid.width; ++u) {
    const auto s = column_span(y_c[std::size_t(u)], y_f[std::size_t(u)], grid);
    for (int v = 0; v < grid.height; ++v) {
      const Semantic lab = v < s.ceiling_end ? Semantic::ceiling
                           : v < s.floor_begin ? Semantic::wall
                                               : Semantic::floor;
      m.labels[std::size_t(v) * std::size_t(grid.width) + std::size_t(u)] = lab;
    }
  }
  return m;
}

inline SemanticMask render_semantic(const BoundarySignal& signal) {
  return render_semantic(signal.y_c, signal.y_f, signal.grid());
}

inline SemanticMask render_semantic(const VisibleLayout& layout) {
  const auto r = rasterize_layout(layout);
  return render_semantic(r.y_c, r.y_f, layout.grid);
}

inline double pixel_error(const SemanticMask& a, const SemanticMask& b) {
  if (!(a.grid == b.grid) || a.labels.size() != b.labels.size()) {
    throw InputError("semantic masks on different grids");
  }
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.labels.size(); ++i) diff += a.labels[i] != b.labels[i];
  return double(diff) / double(a.labels.size());
}

// --- wireframe ----------------------------------------------------------------------------

struct WireframeOptions {
  bool include_verticals = true;
};

/// Wireframe pixels grouped per column (sorted, unique rows).
using WireframePixels = std::vector<std::vector<int>>;

inline WireframePixels wireframe_pixels(const VisibleLayout& layout,
                                        const WireframeOptions& options = {}) {
  const ImageGrid& g = layout.grid;
  const auto r = rasterize_layout(layout);
  WireframePixels px(std::size_t(g.width));
  auto row_of = [&g](double lat) {
    const double v = std::fabs(lat) < kHalfPi ? lat_to_row(lat, g) : (lat > 0 ? -0.5 : g.height);
    return int(std::clamp(std::lround(v), 0L, long(g.height - 1)));
  };
  for (int u = 0; u < g.width; ++u) {
    px[std::size_t(u)].push_back(row_of(r.y_c[std::size_t(u)]));
    px[std::size_t(u)].push_back(row_of(r.y_f[std::size_t(u)]));
  }
  if (options.include_verticals) {
    for (const auto& c : layout.corners) {
      const int u = wrap_index(std::llround(c.column), g.width);
      const int top = row_of(c.ceil_lat), bottom = row_of(c.floor_lat);
      for (int v = top; v <= bottom; ++v) px[std::size_t(u)].push_back(v);
    }
  }
  for (auto& col : px) {
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
  }
  return px;
}

namespace detail {

/// For every pixel of `from`, the squared distance to the nearest pixel of
/// `to`, capped at (max_t + 1)^2.
inline std::vector<double> nearest_sq(const WireframePixels& from, const WireframePixels& to,
                                      int max_t) {
  const int w = int(from.size());
  const double cap = double(max_t + 1) * (max_t + 1);
  std::vector<double> out;
  for (int u = 0; u < w; ++u) {
    for (int row : from[std::size_t(u)]) {
      double best = cap;
      for (int dx = -max_t; dx <= max_t; ++dx) {
        const auto& col = to[std::size_t(wrap_index(u + dx, w))];
        if (col.empty()) continue;
        auto it = std::lower_bound(col.begin(), col.end(), row);
        double dy = std::numeric_limits<double>::infinity();
        if (it != col.end()) dy = std::min(dy, double(*it - row));
        if (it != col.begin()) dy = std::min(dy, double(row - *std::prev(it)));
        best = std::min(best, double(dx) * dx + dy * dy);
      }
      out.push_back(best);
    }
  }
  return out;
}

}  // namespace detail

inline double wireframe_f(const WireframePixels& pred, const WireframePixels& gt) {
  const auto dp = detail::nearest_sq(pred, gt, int(kPixelThresholds.back()));
  const auto dg = detail::nearest_sq(gt, pred, int(kPixelThresholds.back()));
  if (dp.empty() && dg.empty()) return 1.0;
  if (dp.empty() || dg.empty()) return 0.0;
  double sum = 0.0;
  for (double t : kPixelThresholds) {
    const double t2 = t * t;
    const auto mp = std::count_if(dp.begin(), dp.end(), [t2](double d) { return d <= t2; });
    const auto mg = std::count_if(dg.begin(), dg.end(), [t2](double d) { return d <= t2; });
    sum += f_score(double(mp) / double(dp.size()), double(mg) / double(dg.size()));
  }
  return sum / double(kPixelThresholds.size());
}

inline double wireframe_f(const VisibleLayout& pred, const VisibleLayout& gt,
                          const WireframeOptions& options = {}) {
  if (!(pred.grid == gt.grid)) throw InputError("layouts on different grids");
  return wireframe_f(wireframe_pixels(pred, options), wireframe_pixels(gt, options));
}

// --- planes -------------------------------------------------------------------------------

namespace detail {

struct PlaneRaster {
  std::vector<ColumnSpan> spans;
  std::vector<int> wall;  // wall plane index per column, -1 for none
  int wall_count = 0;
};

inline PlaneRaster plane_raster(const VisibleLayout& layout) {
  const auto r = rasterize_layout(layout);
  const auto occl = layout.occlusion_edges();
  std::vector<int> plane_of_edge(layout.corners.size(), -1);
  PlaneRaster pr;
  for (std::size_t e = 0; e < occl.size(); ++e) {
    if (!occl[e]) plane_of_edge[e] = pr.wall_count++;
  }
  for (int u = 0; u < layout.grid.width; ++u) {
    pr.spans.push_back(column_span(r.y_c[std::size_t(u)], r.y_f[std::size_t(u)], layout.grid));
    pr.wall.push_back(plane_of_edge[std::size_t(r.wall[std::size_t(u)])]);
  }
  return pr;
}

}  // namespace detail

/// Planes are the floor, the ceiling and one wall per corner-to-corner edge
/// (occlusion edges excluded). A predicted plane is correct when its best
/// same-class ground-truth plane has mask IoU above 0.5, one-to-one, greedy
/// by descending IoU.
inline double plane_f(const VisibleLayout& pred, const VisibleLayout& gt) {
  if (!(pred.grid == gt.grid)) throw InputError("layouts on different grids");
  const int h = pred.grid.height;
  const auto p = detail::plane_raster(pred);
  const auto g = detail::plane_raster(gt);
  const std::size_t np = std::size_t(p.wall_count), ng = std::size_t(g.wall_count);

  double ceil_p = 0, ceil_g = 0, ceil_i = 0, floor_p = 0, floor_g = 0, floor_i = 0;
  std::vector<double> wall_p(np, 0.0), wall_g(ng, 0.0), wall_i(np * ng, 0.0);
  for (std::size_t u = 0; u < p.spans.size(); ++u) {
    const auto sp = p.spans[u], sg = g.spans[u];
    ceil_p += sp.ceiling_end;
    ceil_g += sg.ceiling_end;
    ceil_i += std::min(sp.ceiling_end, sg.ceiling_end);
    floor_p += h - sp.floor_begin;
    floor_g += h - sg.floor_begin;
    floor_i += h - std::max(sp.floor_begin, sg.floor_begin);
    const int a = p.wall[u], b = g.wall[u];
    if (a >= 0) wall_p[std::size_t(a)] += sp.floor_begin - sp.ceiling_end;
    if (b >= 0) wall_g[std::size_t(b)] += sg.floor_begin - sg.ceiling_end;
    if (a >= 0 && b >= 0) {
      const int lo = std::max(sp.ceiling_end, sg.ceiling_end);
      const int hi = std::min(sp.floor_begin, sg.floor_begin);
      if (hi > lo) wall_i[std::size_t(a) * ng + std::size_t(b)] += hi - lo;
    }
  }
  auto iou = [](double a, double b, double i) { return a + b - i > 0 ? i / (a + b - i) : 0.0; };

  std::size_t correct = 0;
  if (iou(ceil_p, ceil_g, ceil_i) > 0.5) ++correct;
  if (iou(floor_p, floor_g, floor_i) > 0.5) ++correct;
  struct Match {
    double iou;
    std::size_t a, b;
  };
  std::vector<Match> matches;
  for (std::size_t a = 0; a < np; ++a) {
    for (std::size_t b = 0; b < ng; ++b) {
      const double v = iou(wall_p[a], wall_g[b], wall_i[a * ng + b]);
      if (v > 0.5) matches.push_back({v, a, b});
    }
  }
  std::stable_sort(matches.begin(), matches.end(),
                   [](const Match& x, const Match& y) { return x.iou > y.iou; });
  std::vector<char> used_a(np, 0), used_b(ng, 0);
  for (const auto& m : matches) {
    if (used_a[m.a] || used_b[m.b]) continue;
    used_a[m.a] = used_b[m.b] = 1;
    ++correct;
  }
  const double precision = double(correct) / double(np + 2);
  const double recall = double(correct) / double(ng + 2);
  return f_score(precision, recall);
}

// --- full report ------------------------------------------------------------------------------

struct MetricReport {
  double iou2d = 0.0;
  double iou3d = 0.0;
  double corner_error = 0.0;
  double pixel_error = 0.0;
  double junction_f = 0.0;
  double wireframe_f = 0.0;
  double plane_f = 0.0;
};

enum class Regime { visible, non_visible };

inline Regime parse_regime(std::string_view s) {
  if (s == "visible") return Regime::visible;
  if (s == "non_visible") return Regime::non_visible;
  throw InputError("unknown evaluation regime '" + std::string(s) + "'");
}

inline const char* to_string(Regime r) {
  return r == Regime::visible ? "visible" : "non_visible";
}

/// Ground truth for one scene: the visible layout, and optionally the full
/// room polygon (camera frame) including hidden corners.
struct GroundTruth {
  VisibleLayout visible;
  std::vector<FloorPoint> full_polygon;
};

struct EvalOptions {
  Regime regime = Regime::visible;
  CornerMatching matching = CornerMatching::hungarian;
  WireframeOptions wireframe;
  int iou_resolution = 2048;
};

/// Visible regime compares against the visible layout. Non-visible regime
/// uses the full polygon (when present) for IoU and for the corner sets;
/// image-space masks are identical in both regimes.
inline MetricReport evaluate(const VisibleLayout& pred, const GroundTruth& gt,
                             const EvalOptions& options = {}) {
  const VisibleLayout& gv = gt.visible;
  if (!(pred.grid == gv.grid)) throw InputError("prediction and ground truth grids differ");
  const bool full = options.regime == Regime::non_visible && !gt.full_polygon.empty();
  const auto pred_poly = pred.floor_polygon();
  const auto gt_poly = full ? gt.full_polygon : gv.floor_polygon();
  const auto pred_pts = layout_image_corners(pred);
  const auto gt_pts = full ? polygon_image_corners(gt.full_polygon, gv.camera, gv.room_height, gv.grid)
                           : layout_image_corners(gv);
  MetricReport r;
  r.iou2d = iou_2d(pred_poly, gt_poly, options.iou_resolution);
  r.iou3d = iou_3d(pred_poly, pred.room_height, gt_poly, gv.room_height, options.iou_resolution);
  r.corner_error = corner_error(pred_pts, gt_pts, pred.grid, options.matching);
  r.pixel_error = pixel_error(render_semantic(pred), render_semantic(gv));
  r.junction_f = junction_f(pred_pts, gt_pts, pred.grid);
  r.wireframe_f = wireframe_f(pred, gv, options.wireframe);
  r.plane_f = plane_f(pred, gv);
  return r;
}

inline MetricReport mean_report(std::span<const MetricReport> reports) {
  MetricReport m;
  if (reports.empty()) return m;
  for (const auto& r : reports) {
    m.iou2d += r.iou2d;
    m.iou3d += r.iou3d;
    m.corner_error += r.corner_error;
    m.pixel_error += r.pixel_error;
    m.junction_f += r.junction_f;
    m.wireframe_f += r.wireframe_f;
    m.plane_f += r.plane_f;
  }
  const double n = double(reports.size());
  m.iou2d /= n;
  m.iou3d /= n;
  m.corner_error /= n;
  m.pixel_error /= n;
  m.junction_f /= n;
  m.wireframe_f /= n;
  m.plane_f /= n;
  return m;
}

}  // namespace panolayout
