#pragma once

#include "rbd/fit/cluster.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace rbd::fit {

/// Gaussian process hyperparameters. The kernel is a half-integer Matérn
/// with nu = matern_p + 1/2 (9.5 by default, standing in for nu = 10 whose
/// general form needs modified Bessel functions).
struct GPRConfig {
  int matern_p = 9;              // nu = p + 0.5
  double lengthscale = 10.0;     // m
  double signal_variance = 4.0;  // m^2
  double noise_variance = 0.04;  // m^2
  double jitter = 1e-8;          // initial diagonal jitter
};

/// Closed-form half-integer Matérn covariance k(|y1 - y2|).
double matern_kernel(double y1, double y2, const GPRConfig& cfg);

/// Posterior over x = f(y) from a jittered Cholesky of K + sigma_n^2 I.
struct GprModel {
  GPRConfig cfg;
  Eigen::VectorXd train_y;
  Eigen::VectorXd alpha;                     // (K + sigma_n^2 I)^-1 x
  Eigen::LLT<Eigen::MatrixXd> chol;
  double jitter_used = 0.0;

  double predict_mean(double y) const;
  /// Latent (noise-free) posterior variance.
  double predict_var(double y) const;
};

/// Fit the posterior; escalates jitter up to 1e-4 before failing with
/// "ill-conditioned kernel".
GprModel gpr_train(const std::vector<double>& ys, const std::vector<double>& xs,
                   const GPRConfig& cfg);

/// Observation-noise variance for the confidence interval: the configured
/// floor, raised to the mean squared training residual when the cluster is
/// not explained by a single curve (a merged pair of boundaries leaves large
/// residuals, which is what the CI re-cluster rule keys on).
double estimate_noise_variance(const GprModel& model, const std::vector<double>& ys,
                               const std::vector<double>& xs);

/// One fitted boundary: members, a 0.5 m y-grid over the cluster extent,
/// posterior mean x(y) and the 95% CI half-width (1.96 * posterior std).
struct BoundaryCurve {
  int cluster_id = 0;
  std::vector<int> members;  // indices into the detection point set
  std::vector<double> y_grid, mean_x, ci_half_width;

  double max_ci_width() const {
    double w = 0.0;
    for (double h : ci_half_width) w = std::max(w, 2.0 * h);
    return w;
  }
};

/// Fit one cluster (>= 2 points): subsample to cluster_cfg.subsample_max
/// (seeded), regress x on y, evaluate over the full member y-extent.
BoundaryCurve gpr_fit(const std::vector<Vec2>& pts, const std::vector<int>& members,
                      const GPRConfig& gpr_cfg, const ClusterConfig& cluster_cfg,
                      std::uint64_t subsample_seed);

/// Full module orchestration: cluster -> gap split -> fit; curves whose full
/// CI width exceeds ci_threshold are re-clustered with halved eps (bounded
/// recursion). Result order is canonicalized by (min y, min x) of members.
std::vector<BoundaryCurve> fit_boundaries(const std::vector<Vec2>& pts,
                                          const ClusterConfig& cluster_cfg,
                                          const GPRConfig& gpr_cfg, std::uint64_t seed = 0);

}  // namespace rbd::fit
