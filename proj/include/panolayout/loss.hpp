#pragma once

// Training objective: weighted BCE on corner probability plus L2 on both
// boundary curves, with the two-phase weight/learning-rate schedule.
// Mean reduction everywhere; probabilities clamped to [eps, 1 - eps].

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "panolayout/error.hpp"
#include "panolayout/signal.hpp"

namespace panolayout {

inline constexpr double kProbEpsilon = 1e-7;

struct LossWeights {
  double w1 = 3.0;  // corner term
  double w2 = 1.0;  // boundary term
  double learning_rate = 3e-4;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct LossReport {
  double bce_corner = 0.0;
  double l2_ceiling = 0.0;
  double l2_floor = 0.0;
  double total = 0.0;
};

/// d total / d prediction, per element.
struct LossGradient {
  std::vector<double> y_p;
  std::vector<double> y_c;
  std::vector<double> y_f;
};

namespace detail {
inline void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw InputError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  if (a == 0) throw InputError("loss over empty input");
}
}  // namespace detail

inline double bce_mean(std::span<const double> pred, std::span<const double> target) {
  detail::require_same_length(pred.size(), target.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kProbEpsilon, 1.0 - kProbEpsilon);
    const double t = target[i];
    sum -= t * std::log(p) + (1.0 - t) * std::log1p(-p);
  }
  return sum / double(pred.size());
}

inline std::vector<double> bce_mean_gradient(std::span<const double> pred,
                                             std::span<const double> target) {
  detail::require_same_length(pred.size(), target.size());
  const double n = double(pred.size());
  std::vector<double> g(pred.size(), 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    if (p <= kProbEpsilon || p >= 1.0 - kProbEpsilon) continue;  // clamp is flat there
    g[i] = (p - target[i]) / (p * (1.0 - p)) / n;
  }
  return g;
}

inline double l2_mean(std::span<const double> pred, std::span<const double> target) {
  detail::require_same_length(pred.size(), target.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    sum += e * e;
  }
  return sum / double(pred.size());
}

inline std::vector<double> l2_mean_gradient(std::span<const double> pred,
                                            std::span<const double> target) {
  detail::require_same_length(pred.size(), target.size());
  const double n = double(pred.size());
  std::vector<double> g(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) g[i] = 2.0 * (pred[i] - target[i]) / n;
  return g;
}

inline LossReport total_loss(const BoundarySignal& pred, const BoundarySignal& truth,
                             const LossWeights& w) {
  if (pred.width() != truth.width() || pred.y_c.size() != truth.y_c.size() ||
      pred.y_f.size() != truth.y_f.size()) {
    throw InputError("prediction and ground truth differ in width");
  }
  LossReport r;
  r.bce_corner = bce_mean(pred.y_p, truth.y_p);
  r.l2_ceiling = l2_mean(pred.y_c, truth.y_c);
  r.l2_floor = l2_mean(pred.y_f, truth.y_f);
  r.total = w.w1 * r.bce_corner + w.w2 * (r.l2_ceiling + r.l2_floor);
  return r;
}

inline LossGradient total_loss_gradient(const BoundarySignal& pred, const BoundarySignal& truth,
                                        const LossWeights& w) {
  LossGradient g;
  g.y_p = bce_mean_gradient(pred.y_p, truth.y_p);
  g.y_c = l2_mean_gradient(pred.y_c, truth.y_c);
  g.y_f = l2_mean_gradient(pred.y_f, truth.y_f);
  for (auto& v : g.y_p) v *= w.w1;
  for (auto& v : g.y_c) v *= w.w2;
  for (auto& v : g.y_f) v *= w.w2;
  return g;
}

/// Corners weighted up for the first half of training, boundaries for the second.
inline LossWeights weight_schedule(int epoch, int epochs_per_half = 250) {
  if (epoch < 0) throw InputError("epoch must be non-negative");
  if (epoch < epochs_per_half) return {3.0, 1.0, 3e-4};
  return {1.0, 3.0, 1e-4};
}

}  // namespace panolayout
