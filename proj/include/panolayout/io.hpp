#pragma once

// Text formats: boundary-signal files, corner annotations, layout JSON,
// PLY meshes, SVG floor plans, metric reports and run configs.
// Everything here is pure; the CLI layer owns file-system access.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "panolayout/detect.hpp"
#include "panolayout/error.hpp"
#include "panolayout/geometry.hpp"
#include "panolayout/metrics.hpp"
#include "panolayout/panorama.hpp"
#include "panolayout/signal.hpp"

namespace panolayout {

// --- number formatting --------------------------------------------------------

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::optional<double> parse_double(std::string_view tok) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

/// Whitespace tokenizer that remembers byte offsets.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    if (pos_ >= text_.size()) return std::nullopt;
    start_ = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start_, pos_ - start_);
  }

  std::size_t offset() const { return start_; }
  std::size_t end() const { return text_.size(); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
};

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return lines;
}

}  // namespace detail

// --- boundary-signal files ---------------------------------------------------------

inline constexpr std::string_view kSignalMagic = "PANOSIG1";

/// "PANOSIG1", the width, then width values each of y_p, y_c, y_f.
inline std::string emit_signal_file(const BoundarySignal& signal) {
  signal.validate();
  std::string out(kSignalMagic);
  out += '\n';
  out += std::to_string(signal.width());
  out += '\n';
  for (const auto* row : {&signal.y_p, &signal.y_c, &signal.y_f}) {
    for (std::size_t i = 0; i < row->size(); ++i) {
      if (i) out += ' ';
      out += format_double((*row)[i]);
    }
    out += '\n';
  }
  return out;
}

/// Errors carry the byte offset of the offending token.
inline BoundarySignal parse_signal_file(std::string_view text) {
  detail::Tokenizer tok(text);
  auto magic = tok.next();
  if (!magic || *magic != kSignalMagic) throw ParseError("bad magic (expected PANOSIG1)", 0);
  auto wtok = tok.next();
  if (!wtok) throw ParseError("truncated file: missing width", tok.end());
  int width = 0;
  {
    auto res = std::from_chars(wtok->data(), wtok->data() + wtok->size(), width);
    if (res.ec != std::errc{} || res.ptr != wtok->data() + wtok->size()) {
      throw ParseError("width is not an integer", tok.offset());
    }
  }
  if (width < 4 || width % 2 != 0 || width > (1 << 16)) {
    throw ParseError("unsupported width " + std::to_string(width), tok.offset());
  }
  BoundarySignal s;
  const char* names[] = {"y_p", "y_c", "y_f"};
  std::vector<double>* rows[] = {&s.y_p, &s.y_c, &s.y_f};
  for (int r = 0; r < 3; ++r) {
    rows[r]->reserve(std::size_t(width));
    for (int i = 0; i < width; ++i) {
      auto t = tok.next();
      if (!t) {
        throw ParseError("truncated file: " + std::string(names[r]) + " has " + std::to_string(i) +
                             " of " + std::to_string(width) + " values",
                         tok.end());
      }
      auto v = detail::parse_double(*t);
      if (!v) {
        throw ParseError("non-numeric " + std::string(names[r]) + " value at column " +
                             std::to_string(i),
                         tok.offset());
      }
      const bool ok = r == 0   ? (*v >= 0.0 && *v <= 1.0)
                      : r == 1 ? (*v > 0.0 && *v < kHalfPi)
                               : (*v < 0.0 && *v > -kHalfPi);
      if (!ok) {
        throw ParseError(std::string(names[r]) + " out of range at column " + std::to_string(i),
                         tok.offset());
      }
      rows[r]->push_back(*v);
    }
  }
  if (tok.next()) throw ParseError("trailing data after " + std::to_string(width) + " columns", tok.offset());
  return s;
}

// --- layout files --------------------------------------------------------------------

struct FileCorner {
  double column = 0.0;
  double ceiling_row = 0.0;
  double floor_row = 0.0;
  std::optional<CornerKind> kind;

  friend bool operator==(const FileCorner&, const FileCorner&) = default;
};

/// Corner annotations in pixel space.
struct LayoutFile {
  int format_version = 1;
  ImageGrid grid;
  std::vector<FileCorner> corners;
  std::optional<double> camera_height;
  std::optional<double> room_height;
  std::vector<FloorPoint> full_polygon;  // camera frame, optional

  void validate() const {
    grid.validate();
    for (std::size_t i = 0; i < corners.size(); ++i) {
      const auto& c = corners[i];
      const std::string at = "corner " + std::to_string(i);
      if (!(c.column >= 0.0 && c.column < grid.width)) throw InputError(at + ": column out of range");
      if (!(c.ceiling_row >= 0.0 && c.ceiling_row < grid.height) ||
          !(c.floor_row >= 0.0 && c.floor_row < grid.height)) {
        throw InputError(at + ": row out of range");
      }
      if (!(c.ceiling_row < c.floor_row)) throw InputError(at + ": ceiling row not above floor row");
      if (i > 0 && c.column < corners[i - 1].column) throw InputError(at + ": columns not sorted");
    }
  }
};

inline CornerKind parse_corner_kind(std::string_view s) {
  for (auto k : {CornerKind::visible, CornerKind::occlusion_near, CornerKind::occlusion_far}) {
    if (s == to_string(k)) return k;
  }
  throw InputError("unknown corner kind '" + std::string(s) + "'");
}

inline LayoutFile to_layout_file(const VisibleLayout& layout, std::span<const FloorPoint> full = {}) {
  LayoutFile f;
  f.grid = layout.grid;
  f.camera_height = layout.camera.camera_height;
  f.room_height = layout.room_height;
  for (const auto& c : layout.corners) {
    f.corners.push_back({c.column, lat_to_row(c.ceil_lat, layout.grid),
                         lat_to_row(c.floor_lat, layout.grid), c.kind});
  }
  f.full_polygon.assign(full.begin(), full.end());
  return f;
}

/// Builds the geometric layout. Missing corner kinds are inferred (two
/// corners sharing a column form a pair; the one with the lower floor
/// boundary is nearer); a missing room height is the median of the
/// per-corner estimates.
inline VisibleLayout to_visible_layout(const LayoutFile& f, const CameraModel& default_camera = {}) {
  f.validate();
  const CameraModel cam{f.camera_height.value_or(default_camera.camera_height)};
  cam.validate();
  std::vector<LayoutCorner> corners;
  for (const auto& c : f.corners) {
    corners.push_back({c.column, row_to_lat_unchecked(c.floor_row, f.grid),
                       row_to_lat_unchecked(c.ceiling_row, f.grid), c.kind.value_or(CornerKind::visible)});
    if (corners.back().floor_lat >= 0.0 || corners.back().ceil_lat <= 0.0) {
      throw GeometryError("corner at column " + format_double(c.column) +
                          " does not straddle the horizon");
    }
  }
  for (std::size_t i = 0; i < f.corners.size(); ++i) {
    if (f.corners[i].kind) continue;
    const std::size_t j = (i + 1) % f.corners.size();
    if (j == i || f.corners[j].kind) continue;
    if (std::fabs(cyclic_col_distance(f.corners[i].column, f.corners[j].column, f.grid.width)) < 0.5 &&
        corners[i].kind == CornerKind::visible && corners[j].kind == CornerKind::visible) {
      const bool i_near = f.corners[i].floor_row > f.corners[j].floor_row;
      corners[i].kind = i_near ? CornerKind::occlusion_near : CornerKind::occlusion_far;
      corners[j].kind = i_near ? CornerKind::occlusion_far : CornerKind::occlusion_near;
    }
  }
  double room_height = 0.0;
  if (f.room_height) {
    room_height = *f.room_height;
  } else {
    std::vector<double> est;
    for (const auto& c : corners) {
      if (c.kind == CornerKind::occlusion_far) continue;  // its ceiling edge may be hidden
      const double d = boundary_distance(-c.floor_lat, cam.camera_height);
      est.push_back(cam.camera_height + d * std::tan(c.ceil_lat));
    }
    if (est.empty()) throw EstimationError("no corners to estimate the room height from");
    room_height = median(est);
  }
  return assemble_layout(std::move(corners), f.grid, cam, room_height);
}

// --- corner txt -------------------------------------------------------------------------

/// One "x y" per line; lines 2k and 2k+1 are the ceiling and floor point of
/// one corner. Blank lines are skipped. Errors carry 1-based line numbers.
inline LayoutFile parse_corner_txt(std::string_view text, const ImageGrid& grid = {}) {
  grid.validate();
  struct Point {
    double x, y;
    std::size_t line;
  };
  std::vector<Point> pts;
  const auto lines = detail::split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    detail::Tokenizer tok(lines[li]);
    auto tx = tok.next();
    if (!tx) continue;
    auto ty = tok.next();
    if (!ty) throw ParseError("expected two numbers", lineno);
    if (tok.next()) throw ParseError("extra tokens after 'x y'", lineno);
    auto x = detail::parse_double(*tx);
    auto y = detail::parse_double(*ty);
    if (!x || !y) throw ParseError("non-numeric coordinate", lineno);
    if (!(*x >= 0.0 && *x < grid.width) || !(*y >= 0.0 && *y < grid.height)) {
      throw ParseError("coordinate outside the image", lineno);
    }
    pts.push_back({*x, *y, lineno});
  }
  if (pts.size() % 2 != 0) {
    throw ParseError("odd number of corner lines", pts.back().line);
  }
  LayoutFile f;
  f.grid = grid;
  for (std::size_t k = 0; k < pts.size(); k += 2) {
    const Point& c = pts[k];
    const Point& fl = pts[k + 1];
    if (std::fabs(c.x - fl.x) > 0.5) throw ParseError("ceiling/floor x mismatch", fl.line);
    if (!(c.y < fl.y)) throw ParseError("ceiling point not above floor point", fl.line);
    const double col = 0.5 * (c.x + fl.x);
    if (!f.corners.empty() && col < f.corners.back().column) {
      throw ParseError("x not ascending", c.line);
    }
    f.corners.push_back({col, c.y, fl.y, std::nullopt});
  }
  return f;
}

inline std::string emit_corner_txt(const LayoutFile& f) {
  std::string out;
  for (const auto& c : f.corners) {
    out += format_double(c.column) + ' ' + format_double(c.ceiling_row) + '\n';
    out += format_double(c.column) + ' ' + format_double(c.floor_row) + '\n';
  }
  return out;
}

/// Structured3D panorama layout annotation ("x y" junction list, two
/// junctions per wall corner, arbitrary pair and in-pair order) to corner
/// txt: pairs are grouped by x, ordered by ascending x, ceiling (smaller y)
/// first.
inline std::string convert_structured3d_layout(std::string_view text, const ImageGrid& grid = {}) {
  struct Point {
    double x, y;
  };
  std::vector<Point> pts;
  const auto lines = detail::split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    detail::Tokenizer tok(lines[li]);
    auto tx = tok.next();
    if (!tx) continue;
    auto ty = tok.next();
    if (!ty || tok.next()) throw ParseError("expected 'x y'", li + 1);
    auto x = detail::parse_double(*tx);
    auto y = detail::parse_double(*ty);
    if (!x || !y) throw ParseError("non-numeric coordinate", li + 1);
    pts.push_back({*x, *y});
  }
  if (pts.size() % 2 != 0) throw ParseError("odd number of junctions", lines.size());
  std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  LayoutFile f;
  f.grid = grid;
  for (std::size_t k = 0; k < pts.size(); k += 2) {
    Point a = pts[k], b = pts[k + 1];
    if (std::fabs(a.x - b.x) > 0.5) {
      throw ParseError("junction at x=" + format_double(a.x) + " has no partner", k + 1);
    }
    if (b.y < a.y) std::swap(a, b);
    f.corners.push_back({0.5 * (a.x + b.x), a.y, b.y, std::nullopt});
  }
  return emit_corner_txt(f);
}

// --- layout JSON ----------------------------------------------------------------------------

namespace detail {

using Json = nlohmann::json;

inline void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be an object", 0);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ParseError("unknown key '" + it.key() + "' in " + where, 0);
    }
  }
}

inline Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  } catch (const nlohmann::json::out_of_range& e) {
    // Numeric overflow such as 1e999; nlohmann reports no offset for these.
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0);
  }
}

template <typename T>
T json_get(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError("missing '" + std::string(key) + "' in " + where, 0);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("wrong type for '" + std::string(key) + "' in " + where, 0);
  }
}

inline double json_number(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw ParseError("'" + std::string(key) + "' in " + where + " must be a number", 0);
  }
  return obj.at(key).get<double>();
}

inline int json_int(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
    throw ParseError("'" + std::string(key) + "' in " + where + " must be an integer", 0);
  }
  const auto v = obj.at(key).get<long long>();
  if (v < -(1LL << 30) || v > (1LL << 30)) throw ParseError("'" + std::string(key) + "' out of range", 0);
  return int(v);
}

}  // namespace detail

inline std::string emit_layout_json(const LayoutFile& f) {
  nlohmann::ordered_json j;
  j["format_version"] = f.format_version;
  j["grid"] = {{"width", f.grid.width}, {"height", f.grid.height}};
  if (f.camera_height) j["camera_height"] = *f.camera_height;
  if (f.room_height) j["room_height"] = *f.room_height;
  auto corners = nlohmann::ordered_json::array();
  for (const auto& c : f.corners) {
    nlohmann::ordered_json jc;
    jc["column"] = c.column;
    jc["ceiling_row"] = c.ceiling_row;
    jc["floor_row"] = c.floor_row;
    if (c.kind) jc["kind"] = to_string(*c.kind);
    corners.push_back(std::move(jc));
  }
  j["corners"] = std::move(corners);
  if (!f.full_polygon.empty()) {
    auto poly = nlohmann::ordered_json::array();
    for (const auto& p : f.full_polygon) poly.push_back({p.x, p.y});
    j["full_polygon"] = std::move(poly);
  }
  return j.dump(2) + "\n";
}

inline std::string emit_layout_json(const VisibleLayout& layout, std::span<const FloorPoint> full = {}) {
  if (layout.corners.size() < 3) throw EmitError("layout has fewer than 3 corners");
  return emit_layout_json(to_layout_file(layout, full));
}

inline LayoutFile parse_layout_json(std::string_view text) {
  using detail::Json;
  const Json j = detail::parse_json_text(text);
  detail::reject_unknown_keys(
      j, {"format_version", "grid", "camera_height", "room_height", "corners", "full_polygon"},
      "layout");
  LayoutFile f;
  f.format_version = detail::json_int(j, "format_version", "layout");
  if (f.format_version != 1) throw ParseError("unsupported format_version", 0);
  if (!j.contains("grid")) throw ParseError("missing 'grid' in layout", 0);
  const Json& g = j.at("grid");
  detail::reject_unknown_keys(g, {"width", "height"}, "grid");
  f.grid.width = detail::json_int(g, "width", "grid");
  f.grid.height = detail::json_int(g, "height", "grid");
  try {
    f.grid.validate();
  } catch (const InputError& e) {
    throw ParseError(e.what(), 0);
  }
  if (j.contains("camera_height")) f.camera_height = detail::json_number(j, "camera_height", "layout");
  if (j.contains("room_height")) f.room_height = detail::json_number(j, "room_height", "layout");
  if (!j.contains("corners") || !j.at("corners").is_array()) {
    throw ParseError("'corners' must be an array", 0);
  }
  for (const auto& jc : j.at("corners")) {
    const std::string where = "corner " + std::to_string(f.corners.size());
    detail::reject_unknown_keys(jc, {"column", "ceiling_row", "floor_row", "kind"}, where);
    FileCorner c;
    c.column = detail::json_number(jc, "column", where);
    c.ceiling_row = detail::json_number(jc, "ceiling_row", where);
    c.floor_row = detail::json_number(jc, "floor_row", where);
    if (jc.contains("kind")) {
      try {
        c.kind = parse_corner_kind(detail::json_get<std::string>(jc, "kind", where));
      } catch (const InputError& e) {
        throw ParseError(e.what(), 0);
      }
    }
    f.corners.push_back(c);
  }
  if (j.contains("full_polygon")) {
    const Json& poly = j.at("full_polygon");
    if (!poly.is_array()) throw ParseError("'full_polygon' must be an array", 0);
    for (const auto& p : poly) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ParseError("full_polygon entries must be [x, y]", 0);
      }
      f.full_polygon.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (f.full_polygon.size() < 3 || !is_simple(f.full_polygon)) {
      throw ParseError("full_polygon must be a simple polygon", 0);
    }
  }
  try {
    f.validate();
  } catch (const InputError& e) {
    throw ParseError(e.what(), 0);
  }
  return f;
}

// --- PLY --------------------------------------------------------------------------------------

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
inline std::vector<std::array<std::size_t, 3>> triangulate(std::span<const FloorPoint> poly) {
  std::vector<std::size_t> idx(poly.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<std::array<std::size_t, 3>> tris;
  auto inside = [](FloorPoint p, FloorPoint a, FloorPoint b, FloorPoint c) {
    return cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0;
  };
  while (idx.size() > 3) {
    const std::size_t m = idx.size();
    std::size_t ear = m;
    for (int strict = 1; strict >= 0 && ear == m; --strict) {
      for (std::size_t k = 0; k < m && ear == m; ++k) {
        const FloorPoint a = poly[idx[(k + m - 1) % m]], b = poly[idx[k]], c = poly[idx[(k + 1) % m]];
        const double turn = cross(b - a, c - b);
        if (strict ? !(turn > 0.0) : turn < 0.0) continue;
        bool blocked = false;
        for (std::size_t q = 0; q < m && !blocked; ++q) {
          if (q == k || q == (k + 1) % m || q == (k + m - 1) % m) continue;
          const FloorPoint p = poly[idx[q]];
          if (p == a || p == b || p == c) continue;
          blocked = inside(p, a, b, c);
        }
        if (!blocked) ear = k;
      }
    }
    if (ear == m) ear = 0;  // numerically hopeless; clip anything to guarantee progress
    tris.push_back({idx[(ear + m - 1) % m], idx[ear], idx[(ear + 1) % m]});
    idx.erase(idx.begin() + std::ptrdiff_t(ear));
  }
  if (idx.size() == 3) tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

/// ASCII PLY: vertices 0..n-1 on the floor (z = 0), n..2n-1 on the ceiling;
/// two triangles per wall, none across occlusion edges; floor and ceiling
/// triangulated with n-2 triangles each.
inline std::string emit_ply(const VisibleLayout& layout) {
  const std::size_t n = layout.corners.size();
  if (n < 3) throw EmitError("layout has fewer than 3 corners");
  const auto poly = layout.floor_polygon();
  if (!(signed_area(poly) > 0.0)) throw EmitError("degenerate floor polygon");
  const auto occl = layout.occlusion_edges();
  std::vector<std::array<std::size_t, 3>> faces;
  for (std::size_t i = 0; i < n; ++i) {
    if (occl[i]) continue;
    const std::size_t j = (i + 1) % n;
    faces.push_back({i, j, n + j});
    faces.push_back({i, n + j, n + i});
  }
  for (const auto& t : triangulate(poly)) {
    faces.push_back({t[0], t[2], t[1]});               // floor, facing down out of the room
    faces.push_back({n + t[0], n + t[1], n + t[2]});  // ceiling, facing up
  }
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(2 * n) +
                    "\nproperty double x\nproperty double y\nproperty double z\nelement face " +
                    std::to_string(faces.size()) + "\nproperty list uchar int vertex_indices\nend_header\n";
  for (double z : {0.0, layout.room_height}) {
    for (const auto& p : poly) {
      out += format_double(p.x) + ' ' + format_double(p.y) + ' ' + format_double(z) + '\n';
    }
  }
  for (const auto& f : faces) {
    out += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) + '\n';
  }
  return out;
}

// --- SVG floor plan --------------------------------------------------------------------------

struct SvgLayer {
  const VisibleLayout* layout = nullptr;
  std::string label;
  std::string color;
};

namespace detail {
inline std::string svg_num(double v) {
  double r = std::round(v * 1000.0) / 1000.0;
  if (r == 0.0) r = 0.0;  // no "-0"
  return format_double(r);
}
}  // namespace detail

/// Top-down view at a fixed 80 px per metre, camera at the marked origin,
/// occlusion edges dashed. Later layers draw on top.
inline std::string emit_svg_topdown(std::span<const SvgLayer> layers) {
  constexpr double kScale = 80.0, kMargin = 24.0;
  if (layers.empty()) throw EmitError("nothing to draw");
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const auto& l : layers) {
    if (!l.layout || l.layout->corners.size() < 3) throw EmitError("layout has fewer than 3 corners");
    for (const auto& p : l.layout->floor_polygon()) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  const double width = (xmax - xmin) * kScale + 2 * kMargin;
  const double height = (ymax - ymin) * kScale + 2 * kMargin + 16.0 * double(layers.size());
  auto sx = [&](double x) { return detail::svg_num((x - xmin) * kScale + kMargin); };
  auto sy = [&](double y) { return detail::svg_num((ymax - y) * kScale + kMargin); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) +
                    "\" height=\"" + detail::svg_num(height) + "\" viewBox=\"0 0 " +
                    detail::svg_num(width) + " " + detail::svg_num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& l : layers) {
    const auto poly = l.layout->floor_polygon();
    const auto occl = l.layout->occlusion_edges();
    out += "<g class=\"" + l.label + "\" stroke=\"" + l.color + "\">\n";
    out += "<polygon points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (i) out += ' ';
      out += sx(poly[i].x) + "," + sy(poly[i].y);
    }
    out += "\" fill=\"" + l.color + "\" fill-opacity=\"0.12\" stroke=\"none\"/>\n";
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto a = poly[i], b = poly[(i + 1) % poly.size()];
      out += "<line x1=\"" + sx(a.x) + "\" y1=\"" + sy(a.y) + "\" x2=\"" + sx(b.x) + "\" y2=\"" +
             sy(b.y) + "\" stroke-width=\"2\"";
      if (occl[i]) out += " stroke-dasharray=\"6 4\" class=\"occlusion\"";
      out += "/>\n";
    }
    out += "</g>\n";
  }
  out += "<circle class=\"camera\" cx=\"" + sx(0.0) + "\" cy=\"" + sy(0.0) +
         "\" r=\"4\" fill=\"black\"/>\n";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const double y = (ymax - ymin) * kScale + 2 * kMargin + 16.0 * double(i) + 4.0;
    out += "<text x=\"" + detail::svg_num(kMargin) + "\" y=\"" + detail::svg_num(y) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + layers[i].color + "\">" +
           layers[i].label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline std::string emit_svg_topdown(const VisibleLayout& layout) {
  const SvgLayer layer{&layout, "layout", "#1f5fbf"};
  return emit_svg_topdown(std::span<const SvgLayer>(&layer, 1));
}

/// Prediction drawn over ground truth.
inline std::string emit_svg_topdown(const VisibleLayout& prediction, const VisibleLayout& truth) {
  const SvgLayer layers[] = {{&truth, "truth", "#2a9d3a"}, {&prediction, "prediction", "#c8372d"}};
  return emit_svg_topdown(std::span<const SvgLayer>(layers));
}

// --- reports ----------------------------------------------------------------------------------

struct ReportRow {
  std::string stem;
  MetricReport metrics;
};

inline constexpr const char* kReportColumns[] = {"iou2d",    "iou3d",      "corner_error", "pixel_error",
                                                 "junction_f", "wireframe_f", "plane_f"};

namespace detail {
inline std::array<double, 7> report_values(const MetricReport& m) {
  return {m.iou2d, m.iou3d, m.corner_error, m.pixel_error, m.junction_f, m.wireframe_f, m.plane_f};
}
inline MetricReport rows_mean(std::span<const ReportRow> rows) {
  std::vector<MetricReport> ms;
  for (const auto& r : rows) ms.push_back(r.metrics);
  return mean_report(ms);
}
}  // namespace detail

/// CSV: header, one row per scene, then a "mean" row.
inline std::string emit_report_csv(std::span<const ReportRow> rows) {
  std::string out = "stem";
  for (const char* c : kReportColumns) out += std::string(",") + c;
  out += '\n';
  auto line = [&out](const std::string& stem, const MetricReport& m) {
    out += stem;
    for (double v : detail::report_values(m)) out += ',' + format_double(v);
    out += '\n';
  };
  for (const auto& r : rows) line(r.stem, r.metrics);
  if (!rows.empty()) line("mean", detail::rows_mean(rows));
  return out;
}

/// Fixed-width table for terminals.
inline std::string emit_report_table(std::span<const ReportRow> rows) {
  std::size_t stem_w = 4;
  for (const auto& r : rows) stem_w = std::max(stem_w, r.stem.size());
  char buf[64];
  std::string out;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out += pad("stem", stem_w);
  for (const char* c : kReportColumns) {
    std::snprintf(buf, sizeof buf, " %12s", c);
    out += buf;
  }
  out += '\n';
  auto line = [&](const std::string& stem, const MetricReport& m) {
    out += pad(stem, stem_w);
    for (double v : detail::report_values(m)) {
      std::snprintf(buf, sizeof buf, " %12.4f", v);
      out += buf;
    }
    out += '\n';
  };
  for (const auto& r : rows) line(r.stem, r.metrics);
  if (!rows.empty()) line("mean", detail::rows_mean(rows));
  return out;
}

// --- run config ---------------------------------------------------------------------------------

inline constexpr const char* kConfigEnvVar = "PANOLAYOUT_CONFIG";

struct RunConfig {
  PostprocessMode mode = PostprocessMode::ensemble;
  DetectConfig detect;
  CameraModel camera;
  Regime regime = Regime::visible;
  CornerMatching matching = CornerMatching::hungarian;
  bool wireframe_verticals = true;
  int iou_resolution = 2048;
  std::vector<std::string> render_formats = {"svg", "ply"};

  EvalOptions eval_options() const {
    EvalOptions o;
    o.regime = regime;
    o.matching = matching;
    o.wireframe.include_verticals = wireframe_verticals;
    o.iou_resolution = iou_resolution;
    return o;
  }
};

/// JSON config; every key optional, unknown keys rejected.
inline RunConfig parse_run_config(std::string_view text) {
  using detail::Json;
  const Json j = detail::parse_json_text(text);
  detail::reject_unknown_keys(j,
                              {"mode", "detect", "camera_height", "regime", "corner_matching",
                               "wireframe_verticals", "iou_resolution", "render_formats"},
                              "config");
  RunConfig c;
  try {
    if (j.contains("mode")) c.mode = parse_mode(detail::json_get<std::string>(j, "mode", "config"));
    if (j.contains("camera_height")) c.camera.camera_height = detail::json_number(j, "camera_height", "config");
    if (j.contains("regime")) c.regime = parse_regime(detail::json_get<std::string>(j, "regime", "config"));
    if (j.contains("corner_matching")) {
      c.matching = parse_corner_matching(detail::json_get<std::string>(j, "corner_matching", "config"));
    }
    if (j.contains("wireframe_verticals")) {
      c.wireframe_verticals = detail::json_get<bool>(j, "wireframe_verticals", "config");
    }
    if (j.contains("iou_resolution")) c.iou_resolution = detail::json_int(j, "iou_resolution", "config");
    if (j.contains("render_formats")) {
      c.render_formats = detail::json_get<std::vector<std::string>>(j, "render_formats", "config");
      for (const auto& f : c.render_formats) {
        if (f != "svg" && f != "ply") throw InputError("unknown render format '" + f + "'");
      }
    }
    if (j.contains("detect")) {
      const Json& d = j.at("detect");
      detail::reject_unknown_keys(d,
                                  {"peak_threshold", "peak_min_separation", "slope_threshold",
                                   "kink_threshold", "jump_ratio", "cluster_radius", "extrema_window",
                                   "wall_fit_columns"},
                                  "detect");
      auto& dc = c.detect;
      if (d.contains("peak_threshold")) dc.peak_threshold = detail::json_number(d, "peak_threshold", "detect");
      if (d.contains("peak_min_separation")) {
        dc.peak_min_separation = detail::json_int(d, "peak_min_separation", "detect");
      }
      if (d.contains("slope_threshold")) dc.slope_threshold = detail::json_number(d, "slope_threshold", "detect");
      if (d.contains("kink_threshold")) dc.kink_threshold = detail::json_number(d, "kink_threshold", "detect");
      if (d.contains("jump_ratio")) dc.jump_ratio = detail::json_number(d, "jump_ratio", "detect");
      if (d.contains("cluster_radius")) dc.cluster_radius = detail::json_int(d, "cluster_radius", "detect");
      if (d.contains("extrema_window")) dc.extrema_window = detail::json_int(d, "extrema_window", "detect");
      if (d.contains("wall_fit_columns")) {
        dc.wall_fit_columns = detail::json_int(d, "wall_fit_columns", "detect");
      }
    }
    c.detect.validate();
    c.camera.validate();
    if (c.iou_resolution < 16) throw InputError("iou_resolution must be at least 16");
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid config: ") + e.what(), 0);
  }
  return c;
}

inline std::string emit_run_config(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(c.mode);
  j["camera_height"] = c.camera.camera_height;
  j["regime"] = to_string(c.regime);
  j["corner_matching"] = c.matching == CornerMatching::hungarian ? "hungarian" : "greedy";
  j["wireframe_verticals"] = c.wireframe_verticals;
  j["iou_resolution"] = c.iou_resolution;
  j["render_formats"] = c.render_formats;
  j["detect"] = {{"peak_threshold", c.detect.peak_threshold},
                 {"peak_min_separation", c.detect.peak_min_separation},
                 {"slope_threshold", c.detect.slope_threshold},
                 {"kink_threshold", c.detect.kink_threshold},
                 {"jump_ratio", c.detect.jump_ratio},
                 {"cluster_radius", c.detect.cluster_radius},
                 {"extrema_window", c.detect.extrema_window},
                 {"wall_fit_columns", c.detect.wall_fit_columns}};
  return j.dump(2) + "\n";
}

}  // namespace panolayout
