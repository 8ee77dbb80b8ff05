#pragma once

#include "rbd/core/metrics.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace rbd::seg {

struct LossConfig {
  double lambda_dist = 0.2;  // weight of the distance term
  double dist_clamp = 10.0;  // m; caps the per-point distance penalty
  double eps = 1e-6;
};

/// Mean binary cross-entropy with probabilities clamped to [eps, 1-eps].
inline double bce_loss(const Eigen::VectorXd& probs, const std::vector<int>& labels,
                       double eps = 1e-6) {
  if (static_cast<size_t>(probs.size()) != labels.size())
    throw std::invalid_argument("bce_loss: length mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs(i), eps, 1.0 - eps);
    sum += labels[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(probs.size());
}

/// Normalized clamped distance of each point to its nearest ground-truth
/// boundary point, in [0, 1].
inline std::vector<double> boundary_distances(const std::vector<Vec2>& coords_xy,
                                              const std::vector<Vec2>& gt_xy,
                                              const LossConfig& cfg) {
  std::vector<double> d(coords_xy.size(), 0.0);
  if (gt_xy.empty()) return d;
  for (size_t i = 0; i < coords_xy.size(); ++i)
    d[i] = std::min(nearest_neighbor(coords_xy[i], gt_xy).distance, cfg.dist_clamp) /
           cfg.dist_clamp;
  return d;
}

/// Probability-weighted mean distance of predicted boundary mass to the
/// nearest actual boundary point: sum(p_i d_i) / (sum(p_i) + eps).
/// Zero when there are no ground-truth boundary points.
inline double distance_loss(const Eigen::VectorXd& probs, const std::vector<Vec2>& coords_xy,
                            const std::vector<Vec2>& gt_xy, const LossConfig& cfg = {}) {
  if (gt_xy.empty()) return 0.0;
  const std::vector<double> d = boundary_distances(coords_xy, gt_xy, cfg);
  double num = 0.0, den = cfg.eps;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    num += probs(i) * d[i];
    den += probs(i);
  }
  return num / den;
}

struct LossParts {
  double total = 0.0, bce = 0.0, dist = 0.0;
};

inline LossParts total_loss(const Eigen::VectorXd& probs, const std::vector<int>& labels,
                            const std::vector<Vec2>& coords_xy, const std::vector<Vec2>& gt_xy,
                            const LossConfig& cfg = {}) {
  LossParts parts;
  parts.bce = bce_loss(probs, labels, cfg.eps);
  parts.dist = distance_loss(probs, coords_xy, gt_xy, cfg);
  parts.total = parts.bce + cfg.lambda_dist * parts.dist;
  return parts;
}

/// dTotal/dprob per point (clamped BCE regions contribute zero gradient).
inline Eigen::VectorXd loss_gradient(const Eigen::VectorXd& probs, const std::vector<int>& labels,
                                     const std::vector<Vec2>& coords_xy,
                                     const std::vector<Vec2>& gt_xy, const LossConfig& cfg = {}) {
  if (static_cast<size_t>(probs.size()) != labels.size())
    throw std::invalid_argument("loss_gradient: length mismatch");
  const double n = static_cast<double>(probs.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(probs.size());
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (p > cfg.eps && p < 1.0 - cfg.eps)
      g(i) = (labels[i] ? -1.0 / p : 1.0 / (1.0 - p)) / n;
  }
  if (!gt_xy.empty() && cfg.lambda_dist != 0.0) {
    const std::vector<double> d = boundary_distances(coords_xy, gt_xy, cfg);
    double num = 0.0, den = cfg.eps;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      num += probs(i) * d[i];
      den += probs(i);
    }
    const double value = num / den;
    for (Eigen::Index i = 0; i < probs.size(); ++i)
      g(i) += cfg.lambda_dist * (d[i] - value) / den;
  }
  return g;
}

}  // namespace rbd::seg
