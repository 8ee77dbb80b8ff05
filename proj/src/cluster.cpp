#include "rbd/fit/cluster.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace rbd::fit {

std::vector<int> dbscan(const std::vector<Vec2>& pts, double eps, int min_pts) {
  if (eps <= 0.0 || min_pts < 1) throw std::invalid_argument("dbscan: bad eps/min_pts");
  const int n = static_cast<int>(pts.size());
  const double eps2 = eps * eps;

  std::vector<std::vector<int>> neighbors(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((pts[i] - pts[j]).squaredNorm() <= eps2) neighbors[i].push_back(j);

  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (int seed = 0; seed < n; ++seed) {
    if (label[seed] != kUnvisited) continue;
    if (static_cast<int>(neighbors[seed].size()) < min_pts) {
      label[seed] = kNoise;
      continue;
    }
    label[seed] = cluster;
    std::queue<int> frontier;
    for (int j : neighbors[seed]) frontier.push(j);
    while (!frontier.empty()) {
      const int q = frontier.front();
      frontier.pop();
      if (label[q] == kNoise) label[q] = cluster;  // border point
      if (label[q] != kUnvisited) continue;
      label[q] = cluster;
      if (static_cast<int>(neighbors[q].size()) >= min_pts)
        for (int j : neighbors[q]) frontier.push(j);
    }
    ++cluster;
  }
  return label;
}

std::vector<std::vector<int>> cluster_boundaries(const std::vector<Vec2>& pts,
                                                 const ClusterConfig& cfg) {
  std::vector<Vec2> scaled;
  scaled.reserve(pts.size());
  for (const Vec2& p : pts) scaled.push_back({p.x(), p.y() / cfg.y_scale});
  const std::vector<int> labels = dbscan(scaled, cfg.eps, cfg.min_pts);

  int n_clusters = 0;
  for (int l : labels) n_clusters = std::max(n_clusters, l + 1);
  std::vector<std::vector<int>> clusters(n_clusters);
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[i] >= 0) clusters[labels[i]].push_back(i);
  return clusters;
}

std::vector<std::vector<int>> split_on_gap(const std::vector<Vec2>& pts,
                                           const std::vector<int>& members, double gap_split) {
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
    if (pts[a].y() != pts[b].y()) return pts[a].y() < pts[b].y();
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    return a < b;
  });
  std::vector<std::vector<int>> segments;
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || pts[sorted[i]].y() - pts[sorted[i - 1]].y() > gap_split)
      segments.emplace_back();
    segments.back().push_back(sorted[i]);
  }
  return segments;
}

}  // namespace rbd::fit
