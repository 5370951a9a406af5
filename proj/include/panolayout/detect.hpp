#pragma once

// Post-processing of per-column network output into a visible layout:
// corner peaks from y_p, discontinuities from the boundary curves (image
// slope and kink tests) and from the wall-distance profile (ratio jumps),
// ensembling of the candidates, and near/far corner extraction at each
// confirmed discontinuity.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "panolayout/error.hpp"
#include "panolayout/geometry.hpp"
#include "panolayout/panorama.hpp"
#include "panolayout/signal.hpp"

namespace panolayout {

struct DetectConfig {
  double peak_threshold = 0.5;
  int peak_min_separation = 0;   // columns; 0 selects width / 64
  double slope_threshold = 0.015;  // rad / column
  double kink_threshold = 0.008;   // rad / column^2
  double jump_ratio = 1.15;
  int cluster_radius = 4;
  int extrema_window = 5;
  int wall_fit_columns = 6;  // samples per side when fitting a wall line

  int min_separation(int width) const {
    return peak_min_separation > 0 ? peak_min_separation : std::max(1, width / 64);
  }

  void validate() const {
    if (!(peak_threshold > 0.0 && slope_threshold > 0.0 && kink_threshold > 0.0)) {
      throw InputError("detection thresholds must be positive");
    }
    if (!(jump_ratio > 1.0)) throw InputError("jump_ratio must exceed 1");
    if (peak_min_separation < 0 || cluster_radius <= 0 || extrema_window <= 0 ||
        wall_fit_columns < 2) {
      throw InputError("detection windows must be positive (wall_fit_columns >= 2)");
    }
  }
};

enum class CandidateSource : std::uint8_t {
  slope2d_ceiling,
  slope2d_floor,
  kink2d_ceiling,
  kink2d_floor,
  jump3d_ceiling,
  jump3d_floor,
};

inline const char* to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::slope2d_ceiling: return "slope2d_ceiling";
    case CandidateSource::slope2d_floor: return "slope2d_floor";
    case CandidateSource::kink2d_ceiling: return "kink2d_ceiling";
    case CandidateSource::kink2d_floor: return "kink2d_floor";
    case CandidateSource::jump3d_ceiling: return "jump3d_ceiling";
    case CandidateSource::jump3d_floor: return "jump3d_floor";
  }
  return "?";
}

inline bool is_2d(CandidateSource s) {
  return s != CandidateSource::jump3d_ceiling && s != CandidateSource::jump3d_floor;
}
inline bool is_kink(CandidateSource s) {
  return s == CandidateSource::kink2d_ceiling || s == CandidateSource::kink2d_floor;
}

struct DiscontinuityCandidate {
  int column = 0;
  CandidateSource source = CandidateSource::slope2d_floor;
  double strength = 0.0;

  friend bool operator==(const DiscontinuityCandidate&, const DiscontinuityCandidate&) = default;
};

enum class PostprocessMode { two_d_only, three_d_only, ensemble };

inline const char* to_string(PostprocessMode m) {
  switch (m) {
    case PostprocessMode::two_d_only: return "2d_only";
    case PostprocessMode::three_d_only: return "3d_only";
    case PostprocessMode::ensemble: return "ensemble";
  }
  return "?";
}

inline PostprocessMode parse_mode(std::string_view s) {
  if (s == "2d_only") return PostprocessMode::two_d_only;
  if (s == "3d_only") return PostprocessMode::three_d_only;
  if (s == "ensemble") return PostprocessMode::ensemble;
  throw InputError("unknown mode '" + std::string(s) + "' (2d_only, 3d_only, ensemble)");
}

// --- corner peaks -------------------------------------------------------------

/// Cyclic local maxima of y_p at or above the threshold, greedily thinned to
/// the minimum separation (higher peak wins, ties to the lower column).
inline std::vector<int> extract_corner_peaks(std::span<const double> y_p,
                                             const DetectConfig& config) {
  const int w = int(y_p.size());
  if (w < 3) return {};
  std::vector<int> maxima;
  for (int i = 0; i < w; ++i) {
    const double v = y_p[std::size_t(i)];
    const double left = y_p[std::size_t(wrap_index(i - 1, w))];
    const double right = y_p[std::size_t(wrap_index(i + 1, w))];
    // Strict on the left so a plateau yields its first column only.
    if (v >= config.peak_threshold && v > left && v >= right) maxima.push_back(i);
  }
  std::stable_sort(maxima.begin(), maxima.end(), [&](int a, int b) {
    return y_p[std::size_t(a)] > y_p[std::size_t(b)];
  });
  const int sep = config.min_separation(w);
  std::vector<int> kept;
  for (int m : maxima) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](int k) {
      return cyclic_col_distance(m, k, w) >= sep;
    });
    if (clear) kept.push_back(m);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

/// Sub-column peak position from a three-point parabola, fitted on log values
/// when all three are positive (exact for Gaussian bumps).
inline double refine_peak(std::span<const double> y_p, int column) {
  const int w = int(y_p.size());
  double l = y_p[std::size_t(wrap_index(column - 1, w))];
  double c = y_p[std::size_t(column)];
  double r = y_p[std::size_t(wrap_index(column + 1, w))];
  if (l > 0.0 && c > 0.0 && r > 0.0) {
    l = std::log(l);
    c = std::log(c);
    r = std::log(r);
  }
  const double denom = l - 2.0 * c + r;
  if (!(denom < 0.0)) return column;
  const double offset = std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
  return wrap_col(column + offset, w);
}

// --- candidate detectors --------------------------------------------------------

/// Image-space discontinuities of one boundary curve: a slope candidate at i
/// when |y[i+1] - y[i]| exceeds the slope threshold, and a kink candidate at i
/// when the second difference of the 5-column box-smoothed curve exceeds the
/// kink threshold.
inline std::vector<DiscontinuityCandidate> detect_2d(std::span<const double> y, Boundary which,
                                                     const DetectConfig& config) {
  const int w = int(y.size());
  std::vector<DiscontinuityCandidate> out;
  if (w < 3) return out;
  const auto slope_src = which == Boundary::ceiling ? CandidateSource::slope2d_ceiling
                                                    : CandidateSource::slope2d_floor;
  const auto kink_src = which == Boundary::ceiling ? CandidateSource::kink2d_ceiling
                                                   : CandidateSource::kink2d_floor;
  auto at = [&](int i) { return y[std::size_t(wrap_index(i, w))]; };
  for (int i = 0; i < w; ++i) {
    const double jump = std::fabs(at(i + 1) - at(i));
    if (jump > config.slope_threshold) out.push_back({i, slope_src, jump});
  }
  std::vector<double> smooth(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) {
    smooth[std::size_t(i)] = (at(i - 2) + at(i - 1) + at(i) + at(i + 1) + at(i + 2)) / 5.0;
  }
  for (int i = 0; i < w; ++i) {
    const double second = smooth[std::size_t(wrap_index(i + 1, w))] - 2.0 * smooth[std::size_t(i)] +
                          smooth[std::size_t(wrap_index(i - 1, w))];
    if (std::fabs(second) > config.kink_threshold) {
      out.push_back({i, kink_src, std::fabs(second)});
    }
  }
  return out;
}

/// Distance-profile jumps: candidate at i when max/min of d[i], d[i+1]
/// exceeds the jump ratio. Strength is the ratio.
inline std::vector<DiscontinuityCandidate> detect_3d(std::span<const double> distance,
                                                     Boundary which,
                                                     const DetectConfig& config) {
  const int w = int(distance.size());
  for (int i = 0; i < w; ++i) {
    const double d = distance[std::size_t(i)];
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw InputError("non-positive wall distance at column " + std::to_string(i));
    }
  }
  const auto src = which == Boundary::ceiling ? CandidateSource::jump3d_ceiling
                                              : CandidateSource::jump3d_floor;
  std::vector<DiscontinuityCandidate> out;
  for (int i = 0; i < w; ++i) {
    const double a = distance[std::size_t(i)];
    const double b = distance[std::size_t(wrap_index(i + 1, w))];
    const double ratio = std::max(a, b) / std::min(a, b);
    if (ratio > config.jump_ratio) out.push_back({i, src, ratio});
  }
  return out;
}

// --- ensemble ---------------------------------------------------------------------

/// Strength rescaled to "multiples of the detection threshold" so that
/// radian-valued and ratio-valued candidates weigh comparably.
inline double candidate_weight(const DiscontinuityCandidate& c, const DetectConfig& config) {
  switch (c.source) {
    case CandidateSource::slope2d_ceiling:
    case CandidateSource::slope2d_floor: return c.strength / config.slope_threshold;
    case CandidateSource::kink2d_ceiling:
    case CandidateSource::kink2d_floor: return c.strength / config.kink_threshold;
    case CandidateSource::jump3d_ceiling:
    case CandidateSource::jump3d_floor:
      return std::log(c.strength) / std::log(config.jump_ratio);
  }
  return c.strength;
}

struct Discontinuity {
  double column = 0.0;  // strength-weighted mean of the members, [0, width)
  std::vector<DiscontinuityCandidate> members;
  std::optional<int> peak;  // y_p peak merged into this cluster

  bool has_2d_jump() const {
    return std::any_of(members.begin(), members.end(), [](const auto& m) {
      return is_2d(m.source) && !is_kink(m.source);
    });
  }
  bool has_3d() const {
    return std::any_of(members.begin(), members.end(),
                       [](const auto& m) { return !is_2d(m.source); });
  }
  bool kink_only() const {
    return std::all_of(members.begin(), members.end(),
                       [](const auto& m) { return is_kink(m.source); });
  }
};

/// Single-linkage cyclic clustering of candidates within cluster_radius; one
/// confirmed column per cluster. Clusters within cluster_radius of a corner
/// peak carry that peak so the caller can fold it into occlusion handling.
inline std::vector<Discontinuity> ensemble(std::span<const DiscontinuityCandidate> candidates,
                                           std::span<const int> peaks, int width,
                                           const DetectConfig& config) {
  std::vector<DiscontinuityCandidate> sorted(candidates.begin(), candidates.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.column != b.column ? a.column < b.column : a.source < b.source;
  });
  std::vector<std::vector<DiscontinuityCandidate>> groups;
  for (const auto& c : sorted) {
    if (groups.empty() || c.column - groups.back().back().column > config.cluster_radius) {
      groups.emplace_back();
    }
    groups.back().push_back(c);
  }
  if (groups.size() > 1 &&
      groups.front().front().column + width - groups.back().back().column <= config.cluster_radius) {
    auto& tail = groups.back();
    tail.insert(tail.end(), groups.front().begin(), groups.front().end());
    groups.erase(groups.begin());
  }

  std::vector<Discontinuity> out;
  for (auto& g : groups) {
    Discontinuity d;
    const int anchor = g.front().column;
    double wsum = 0.0, osum = 0.0;
    int lo = 0, hi = 0;
    for (const auto& c : g) {
      int off = c.column - anchor;
      if (off < 0) off += width;  // member wrapped past the seam
      lo = std::min(lo, off);
      hi = std::max(hi, off);
      const double wt = candidate_weight(c, config);
      wsum += wt;
      osum += wt * off;
    }
    d.column = wrap_col(anchor + osum / wsum, width);
    double best = 0.0;
    for (int p : peaks) {
      double off = wrap_col(double(p - anchor), width);
      if (off > 0.5 * width) off -= width;
      if (off >= lo - config.cluster_radius && off <= hi + config.cluster_radius) {
        const double dist = cyclic_col_distance(p, d.column, width);
        if (!d.peak || dist < best) {
          d.peak = p;
          best = dist;
        }
      }
    }
    d.members = std::move(g);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.column < b.column; });
  return out;
}

// --- wall lines ---------------------------------------------------------------------

/// A straight wall seen from the camera satisfies tan|lat| = a*cos(t) + b*sin(t)
/// with t = lon - ref_lon. Fitting that model over a few columns and
/// evaluating it elsewhere extrapolates the wall exactly for clean signals.
struct WallLine {
  double ref_lon = 0.0;
  double a = 0.0;
  double b = 0.0;

  std::optional<double> tan_at(double lon) const {
    const double t = lon - ref_lon;
    const double v = a * std::cos(t) + b * std::sin(t);
    if (!(v > 1e-9) || !std::isfinite(v)) return std::nullopt;
    return v;
  }
};

inline std::optional<WallLine> fit_wall(std::span<const double> lats, std::span<const int> columns,
                                        const ImageGrid& grid, double ref_lon) {
  if (columns.size() < 2) return std::nullopt;
  double scc = 0, scs = 0, sss = 0, scy = 0, ssy = 0;
  for (int u : columns) {
    const double t = col_to_lon_unwrapped(u, grid) - ref_lon;
    const double dt = std::remainder(t, kTwoPi);
    const double c = std::cos(dt), s = std::sin(dt);
    const double y = std::tan(std::fabs(lats[std::size_t(u)]));
    scc += c * c;
    scs += c * s;
    sss += s * s;
    scy += c * y;
    ssy += s * y;
  }
  const double det = scc * sss - scs * scs;
  if (!(std::fabs(det) > 1e-18)) return std::nullopt;
  WallLine line;
  line.ref_lon = ref_lon;
  line.a = (scy * sss - ssy * scs) / det;
  line.b = (ssy * scc - scy * scs) / det;
  return line;
}

// --- occlusion pairs -------------------------------------------------------------------

struct OcclusionPair {
  LayoutCorner near;
  LayoutCorner far;
  int split = 0;             // discontinuity lies between split and split + 1
  double floor_step = 0.0;   // image-space step heights at the split, radians
  double ceiling_step = 0.0;

  bool near_is_left() const { return near.column == double(split); }
};

namespace detail {

/// Signed step at the gap j | j+1: line fits over `n` samples on each side,
/// both extrapolated to j + 0.5.
inline double step_height(std::span<const double> y, int j, int n) {
  const int w = int(y.size());
  auto fit_at = [&](int first, int dir) {
    // Samples at offsets x = 0, dir, 2*dir, ... from column `first`.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < n; ++k) {
      const double x = dir * k;
      const double v = y[std::size_t(wrap_index(first + dir * k, w))];
      sx += x;
      sy += v;
      sxx += x * x;
      sxy += x * v;
    }
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double icpt = (sy - slope * sx) / n;
    return icpt + slope * 0.5 * dir;
  };
  return fit_at(j + 1, 1) - fit_at(j, -1);
}

}  // namespace detail

/// Locates the exact column gap of a discontinuity within +-extrema_window of
/// `column` and returns the corners flanking it: the near corner on the side
/// with the lower floor point (larger |y_f|), the far corner on the other.
inline OcclusionPair extract_occlusion_pair(const BoundarySignal& signal, double column,
                                            const DetectConfig& config) {
  const int w = signal.width();
  if (!(column >= 0.0 && column < w)) {
    throw InputError("discontinuity column " + std::to_string(column) + " outside the panorama");
  }
  constexpr int kStepSamples = 4;
  const int centre = int(std::lround(column));
  int best_j = 0;
  double best_score = -1.0, best_f = 0.0, best_c = 0.0;
  for (int k = 0; k <= 2 * config.extrema_window; ++k) {
    // Visit offsets 0, -1, +1, -2, +2, ... so ties resolve toward the centre.
    const int off = (k % 2 == 0) ? -(k / 2) : (k + 1) / 2;
    const int j = wrap_index(centre + off, w);
    const double sf = detail::step_height(signal.y_f, j, kStepSamples);
    const double sc = detail::step_height(signal.y_c, j, kStepSamples);
    const double score = std::fabs(sf) + std::fabs(sc);
    if (score > best_score + 1e-15) {
      best_score = score;
      best_j = j;
      best_f = sf;
      best_c = sc;
    }
  }
  const int left = best_j, right = wrap_index(best_j + 1, w);
  const double lf = std::fabs(signal.y_f[std::size_t(left)]);
  const double rf = std::fabs(signal.y_f[std::size_t(right)]);
  if (best_score <= 1e-12 || lf == rf) {
    throw AmbiguityError("no discontinuity near column " + std::to_string(column));
  }
  const int near_col = lf > rf ? left : right;
  const int far_col = lf > rf ? right : left;
  OcclusionPair pair;
  pair.near = {double(near_col), signal.y_f[std::size_t(near_col)],
               signal.y_c[std::size_t(near_col)], CornerKind::occlusion_near};
  pair.far = {double(far_col), signal.y_f[std::size_t(far_col)],
              signal.y_c[std::size_t(far_col)], CornerKind::occlusion_far};
  pair.split = best_j;
  pair.floor_step = best_f;
  pair.ceiling_step = best_c;
  return pair;
}

// --- full pipeline -----------------------------------------------------------------------

struct PostprocessResult {
  VisibleLayout layout;
  std::vector<int> peaks;
  std::vector<DiscontinuityCandidate> candidates;
  std::vector<Discontinuity> clusters;
  std::vector<OcclusionPair> pairs;
};

inline std::vector<DiscontinuityCandidate> collect_candidates(const BoundarySignal& signal,
                                                              PostprocessMode mode,
                                                              const DetectConfig& config,
                                                              const CameraModel& cam,
                                                              double room_height) {
  std::vector<DiscontinuityCandidate> out;
  auto append = [&out](std::vector<DiscontinuityCandidate> v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  if (mode != PostprocessMode::three_d_only) {
    append(detect_2d(signal.y_c, Boundary::ceiling, config));
    append(detect_2d(signal.y_f, Boundary::floor, config));
  }
  if (mode != PostprocessMode::two_d_only) {
    append(detect_3d(wall_distance_profile(signal.y_f, Boundary::floor, cam, room_height),
                     Boundary::floor, config));
    if (room_height > cam.camera_height) {
      append(detect_3d(wall_distance_profile(signal.y_c, Boundary::ceiling, cam, room_height),
                       Boundary::ceiling, config));
    }
  }
  return out;
}

namespace detail {

/// Columns [start, start + dir, ...] up to `count` samples, stopping before
/// any column whose cyclic distance from `anchor` reaches `limit`.
inline std::vector<int> side_columns(int start, int dir, int count, double anchor, double limit,
                                     int width) {
  std::vector<int> cols;
  for (int k = 0; k < count; ++k) {
    const int u = wrap_index(start + dir * k, width);
    if (cyclic_col_distance(u, anchor, width) >= limit) break;
    cols.push_back(u);
  }
  return cols;
}

/// Camera-to-wall distance at `column`, averaging the floor- and
/// ceiling-derived wall fits over the given sample columns.
inline std::optional<double> wall_distance_at(const BoundarySignal& signal,
                                              std::span<const std::vector<int>> sides,
                                              double column, const CameraModel& cam,
                                              double room_height) {
  const ImageGrid grid = signal.grid();
  const double lon = col_to_lon_unwrapped(column, grid);
  double fsum = 0.0, csum = 0.0;
  int fn = 0, cn = 0;
  for (const auto& cols : sides) {
    if (auto line = fit_wall(signal.y_f, cols, grid, lon)) {
      if (auto t = line->tan_at(lon)) {
        fsum += *t;
        ++fn;
      }
    }
    if (auto line = fit_wall(signal.y_c, cols, grid, lon)) {
      if (auto t = line->tan_at(lon)) {
        csum += *t;
        ++cn;
      }
    }
  }
  const double above = room_height - cam.camera_height;
  double dsum = 0.0;
  int dn = 0;
  if (fn > 0) {
    dsum += cam.camera_height / (fsum / fn);
    ++dn;
  }
  if (cn > 0 && above > 0.0) {
    dsum += above / (csum / cn);
    ++dn;
  }
  if (dn == 0) return std::nullopt;
  return dsum / dn;
}

}  // namespace detail

inline PostprocessResult postprocess_detailed(const BoundarySignal& signal,
                                              const DetectConfig& config, PostprocessMode mode,
                                              const CameraModel& cam = {}) {
  signal.validate();
  config.validate();
  cam.validate();
  const int w = signal.width();
  const ImageGrid grid = signal.grid();
  const double room_height = estimate_room_height(signal, cam);

  PostprocessResult res;
  res.peaks = extract_corner_peaks(signal.y_p, config);
  res.candidates = collect_candidates(signal, mode, config, cam, room_height);
  res.clusters = ensemble(res.candidates, res.peaks, w, config);

  // A cluster becomes an occlusion pair only if the located gap is a genuine
  // step: image step above the slope threshold for 2D evidence, wall-distance
  // ratio above the jump ratio for 3D evidence.
  constexpr int kSideSamples = 4;
  for (const auto& cl : res.clusters) {
    if (cl.kink_only()) continue;
    OcclusionPair pair;
    try {
      pair = extract_occlusion_pair(signal, cl.column, config);
    } catch (const AmbiguityError&) {
      continue;
    }
    if (std::any_of(res.pairs.begin(), res.pairs.end(),
                    [&](const auto& p) { return p.split == pair.split; })) {
      continue;
    }
    bool confirmed = false;
    if (cl.has_2d_jump()) {
      confirmed = std::max(std::fabs(pair.floor_step), std::fabs(pair.ceiling_step)) >
                  config.slope_threshold;
    }
    if (!confirmed && cl.has_3d()) {
      const double mid = pair.split + 0.5;
      const auto left = detail::side_columns(pair.split, -1, kSideSamples, mid, 1e9, w);
      const auto right = detail::side_columns(pair.split + 1, 1, kSideSamples, mid, 1e9, w);
      const auto dl = detail::wall_distance_at(signal, std::span(&left, 1), mid, cam, room_height);
      const auto dr = detail::wall_distance_at(signal, std::span(&right, 1), mid, cam, room_height);
      if (dl && dr) confirmed = std::max(*dl, *dr) / std::min(*dl, *dr) > config.jump_ratio;
    }
    if (confirmed) res.pairs.push_back(pair);
  }

  // Events in column order: visible corners at refined peak positions and
  // occlusion pairs at the midpoint of their gap.
  struct Event {
    double column;
    int pair = -1;  // index into res.pairs, or -1 for a visible corner
  };
  std::vector<Event> events;
  for (std::size_t k = 0; k < res.pairs.size(); ++k) {
    // The occluding corner's own y_p peak, when it falls inside the located
    // gap, pins the shared column more precisely than the gap midpoint.
    const int split = res.pairs[k].split;
    double column = split + 0.5;
    for (int p : res.peaks) {
      const double refined = refine_peak(signal.y_p, p);
      const double off = wrap_col(refined - split, w);
      if (off >= 0.0 && off <= 1.0) column = split + off;
    }
    events.push_back({wrap_col(column, w), int(k)});
  }
  for (int p : res.peaks) {
    const bool absorbed = std::any_of(res.pairs.begin(), res.pairs.end(), [&](const auto& pr) {
      return cyclic_col_distance(p, pr.split + 0.5, w) <= config.cluster_radius + 0.5;
    });
    if (!absorbed) events.push_back({refine_peak(signal.y_p, p), -1});
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.column < b.column; });

  const int fit_n = config.wall_fit_columns;
  std::vector<LayoutCorner> corners;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const Event& ev = events[k];
    const std::size_t n = events.size();
    const double prev_gap =
        n > 1 ? cyclic_col_distance(ev.column, events[(k + n - 1) % n].column, w) : 0.5 * w;
    const double next_gap =
        n > 1 ? cyclic_col_distance(ev.column, events[(k + 1) % n].column, w) : 0.5 * w;
    if (ev.pair < 0) {
      const double c = ev.column;
      const int lo = int(std::floor(c)), hi = int(std::ceil(c));
      // Skip the column(s) touching the corner itself.
      const std::vector<int> sides[2] = {
          detail::side_columns(lo - 1, -1, fit_n, c, 0.5 * prev_gap, w),
          detail::side_columns(hi + 1, 1, fit_n, c, 0.5 * next_gap, w)};
      double d;
      if (auto fitted = detail::wall_distance_at(signal, sides, c, cam, room_height)) {
        d = *fitted;
      } else {
        d = boundary_distance(signal.y_f[std::size_t(wrap_index(std::lround(c), w))],
                              cam.camera_height);
      }
      corners.push_back({c, floor_lat_at_distance(d, cam),
                         ceil_lat_at_distance(d, room_height, cam), CornerKind::visible});
      continue;
    }
    const OcclusionPair& pr = res.pairs[std::size_t(ev.pair)];
    const double mid = ev.column;
    const std::vector<int> left[1] = {
        detail::side_columns(pr.split, -1, fit_n, mid, 0.5 * prev_gap, w)};
    const std::vector<int> right[1] = {
        detail::side_columns(pr.split + 1, 1, fit_n, mid, 0.5 * next_gap, w)};
    const auto dl = detail::wall_distance_at(signal, left, mid, cam, room_height);
    const auto dr = detail::wall_distance_at(signal, right, mid, cam, room_height);
    LayoutCorner lc = pr.near_is_left() ? pr.near : pr.far;
    LayoutCorner rc = pr.near_is_left() ? pr.far : pr.near;
    lc.column = rc.column = mid;
    if (dl && dr && (*dl < *dr) == pr.near_is_left()) {
      lc.floor_lat = floor_lat_at_distance(*dl, cam);
      lc.ceil_lat = ceil_lat_at_distance(*dl, room_height, cam);
      rc.floor_lat = floor_lat_at_distance(*dr, cam);
      rc.ceil_lat = ceil_lat_at_distance(*dr, room_height, cam);
    }
    corners.push_back(lc);
    corners.push_back(rc);
  }
  if (corners.size() < 3) {
    throw ReconstructionError("signal yields only " + std::to_string(corners.size()) +
                              " corners; a layout needs at least 3");
  }
  res.layout = assemble_layout(std::move(corners), grid, cam, room_height);
  return res;
}

inline VisibleLayout postprocess(const BoundarySignal& signal, const DetectConfig& config,
                                 PostprocessMode mode, const CameraModel& cam = {}) {
  return postprocess_detailed(signal, config, mode, cam).layout;
}

}  // namespace panolayout
