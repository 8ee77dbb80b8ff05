#include "rbd/fit/gpr.hpp"

#include "rbd/util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbd::fit {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;  // exact in double up to 18!
}

}  // namespace

double matern_kernel(double y1, double y2, const GPRConfig& cfg) {
  const int p = cfg.matern_p;
  const double nu = p + 0.5;
  const double a = std::sqrt(2.0 * nu) * std::abs(y1 - y2) / cfg.lengthscale;
  double sum = 0.0;
  for (int i = 0; i <= p; ++i)
    sum += factorial(p + i) / (factorial(i) * factorial(p - i)) * std::pow(2.0 * a, p - i);
  return cfg.signal_variance * std::exp(-a) * factorial(p) / factorial(2 * p) * sum;
}

double GprModel::predict_mean(double y) const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < train_y.size(); ++i)
    m += matern_kernel(y, train_y(i), cfg) * alpha(i);
  return m;
}

double GprModel::predict_var(double y) const {
  Eigen::VectorXd k(train_y.size());
  for (Eigen::Index i = 0; i < train_y.size(); ++i) k(i) = matern_kernel(y, train_y(i), cfg);
  const Eigen::VectorXd v = chol.matrixL().solve(k);
  return std::max(0.0, matern_kernel(y, y, cfg) - v.squaredNorm());
}

GprModel gpr_train(const std::vector<double>& ys, const std::vector<double>& xs,
                   const GPRConfig& cfg) {
  if (ys.size() != xs.size() || ys.size() < 2)
    throw std::invalid_argument("gpr_train: need >= 2 (y, x) pairs");
  const int n = static_cast<int>(ys.size());
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      gram(i, j) = matern_kernel(ys[i], ys[j], cfg);
      gram(j, i) = gram(i, j);
    }
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), n);

  GprModel model;
  model.cfg = cfg;
  model.train_y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
  for (double jitter = cfg.jitter; jitter <= 1e-4 * 1.0000001; jitter *= 10.0) {
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += cfg.noise_variance + jitter;
    model.chol.compute(k);
    if (model.chol.info() == Eigen::Success) {
      model.jitter_used = jitter;
      model.alpha = model.chol.solve(x);
      return model;
    }
  }
  throw std::runtime_error("ill-conditioned kernel");
}

double estimate_noise_variance(const GprModel& model, const std::vector<double>& ys,
                               const std::vector<double>& xs) {
  double ss = 0.0;
  for (size_t i = 0; i < ys.size(); ++i) {
    const double r = xs[i] - model.predict_mean(ys[i]);
    ss += r * r;
  }
  return std::max(model.cfg.noise_variance, ss / static_cast<double>(ys.size()));
}

BoundaryCurve gpr_fit(const std::vector<Vec2>& pts, const std::vector<int>& members,
                      const GPRConfig& gpr_cfg, const ClusterConfig& cluster_cfg,
                      std::uint64_t subsample_seed) {
  if (members.size() < 2) throw std::invalid_argument("gpr_fit: cluster needs >= 2 points");

  std::vector<int> fit_members = members;
  if (static_cast<int>(fit_members.size()) > cluster_cfg.subsample_max) {
    auto rng = substream(subsample_seed, Stream::fit_subsample);
    std::vector<int> pick =
        sample_indices(static_cast<int>(members.size()), cluster_cfg.subsample_max, rng);
    std::sort(pick.begin(), pick.end());
    fit_members.clear();
    for (int i : pick) fit_members.push_back(members[i]);
  }

  std::vector<double> ys, xs;
  ys.reserve(fit_members.size());
  xs.reserve(fit_members.size());
  for (int i : fit_members) {
    ys.push_back(pts[i].y());
    xs.push_back(pts[i].x());
  }
  const GprModel model = gpr_train(ys, xs, gpr_cfg);

  double y_lo = pts[members[0]].y(), y_hi = y_lo;
  for (int i : members) {
    y_lo = std::min(y_lo, pts[i].y());
    y_hi = std::max(y_hi, pts[i].y());
  }

  BoundaryCurve curve;
  curve.members = members;
  for (double y = y_lo; y < y_hi + 1e-9; y += 0.5) curve.y_grid.push_back(y);
  if (curve.y_grid.empty() || curve.y_grid.back() < y_hi - 1e-9)
    curve.y_grid.push_back(y_hi);
  const double noise_var = estimate_noise_variance(model, ys, xs);
  for (double y : curve.y_grid) {
    curve.mean_x.push_back(model.predict_mean(y));
    curve.ci_half_width.push_back(1.96 * std::sqrt(model.predict_var(y) + noise_var));
  }
  return curve;
}

namespace {

void fit_recursive(const std::vector<Vec2>& pts, const std::vector<int>& subset,
                   ClusterConfig cluster_cfg, const GPRConfig& gpr_cfg, int depth,
                   std::uint64_t seed, std::uint64_t& fit_counter,
                   std::vector<BoundaryCurve>& out) {
  // Cluster the subset; indices map back through `subset`.
  std::vector<Vec2> sub_pts;
  sub_pts.reserve(subset.size());
  for (int i : subset) sub_pts.push_back(pts[i]);

  for (const auto& cluster : cluster_boundaries(sub_pts, cluster_cfg)) {
    for (const auto& segment : split_on_gap(sub_pts, cluster, cluster_cfg.gap_split)) {
      if (static_cast<int>(segment.size()) < cluster_cfg.min_pts) continue;
      std::vector<int> members;
      members.reserve(segment.size());
      for (int i : segment) members.push_back(subset[i]);

      const BoundaryCurve curve =
          gpr_fit(pts, members, gpr_cfg, cluster_cfg, seed + 1000003 * fit_counter++);
      if (curve.max_ci_width() > cluster_cfg.ci_threshold &&
          depth < cluster_cfg.max_recluster_depth) {
        ClusterConfig tighter = cluster_cfg;
        tighter.eps *= 0.5;
        fit_recursive(pts, members, tighter, gpr_cfg, depth + 1, seed, fit_counter, out);
      } else {
        out.push_back(curve);
      }
    }
  }
}

}  // namespace

std::vector<BoundaryCurve> fit_boundaries(const std::vector<Vec2>& pts,
                                          const ClusterConfig& cluster_cfg,
                                          const GPRConfig& gpr_cfg, std::uint64_t seed) {
  std::vector<int> all(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) all[i] = static_cast<int>(i);

  std::vector<BoundaryCurve> curves;
  std::uint64_t fit_counter = 0;
  fit_recursive(pts, all, cluster_cfg, gpr_cfg, 0, seed, fit_counter, curves);

  auto key = [&](const BoundaryCurve& c) {
    double min_y = pts[c.members[0]].y(), min_x = pts[c.members[0]].x();
    for (int i : c.members) {
      min_y = std::min(min_y, pts[i].y());
      min_x = std::min(min_x, pts[i].x());
    }
    return std::make_pair(min_y, min_x);
  };
  std::stable_sort(curves.begin(), curves.end(),
                   [&](const BoundaryCurve& a, const BoundaryCurve& b) { return key(a) < key(b); });
  for (size_t i = 0; i < curves.size(); ++i) curves[i].cluster_id = static_cast<int>(i);
  return curves;
}

}  // namespace rbd::fit
