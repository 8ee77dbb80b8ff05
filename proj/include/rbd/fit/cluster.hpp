#pragma once

#include "rbd/core/types.hpp"

#include <vector>

namespace rbd::fit {

struct ClusterConfig {
  double y_scale = 5.0;          // divide y by this before clustering
  double eps = 1.5;              // m, in scaled space
  int min_pts = 3;
  double gap_split = 6.0;        // m, raw-y gap that splits a cluster
  int subsample_max = 120;       // GPR training-set cap
  double ci_threshold = 2.0;     // m, max full CI width before re-clustering
  int max_recluster_depth = 2;
};

/// Standard density-reachability DBSCAN (-1 = noise). Neighborhood counts
/// include the point itself. Deterministic: seed points are visited in index
/// order, so border points are claimed by the first cluster reaching them.
std::vector<int> dbscan(const std::vector<Vec2>& pts, double eps, int min_pts);

/// DBSCAN on (x, y / y_scale); returns clusters as index lists in discovery
/// order, noise dropped.
std::vector<std::vector<int>> cluster_boundaries(const std::vector<Vec2>& pts,
                                                 const ClusterConfig& cfg);

/// Sort members by y and cut wherever the consecutive y difference exceeds
/// gap_split (strict >). Preserves the member multiset.
std::vector<std::vector<int>> split_on_gap(const std::vector<Vec2>& pts,
                                           const std::vector<int>& members, double gap_split);

}  // namespace rbd::fit
