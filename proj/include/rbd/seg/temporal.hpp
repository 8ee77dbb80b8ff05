#pragma once

#include "rbd/seg/network.hpp"

#include <vector>

namespace rbd::seg {

/// One frame's segmentation output over its fused cloud, kept for the
/// temporal carry into the next frame.
struct Detection {
  std::vector<double> probs;  // raw per-row probability
  std::vector<int> pred;      // prob > 0.5
  std::vector<Vec3> coords;   // row positions in this frame's ego frame
  EgoPose pose;               // ego pose the detection was made in

  std::vector<Vec3> boundary_coords() const {
    std::vector<Vec3> out;
    for (size_t i = 0; i < pred.size(); ++i)
      if (pred[i]) out.push_back(coords[i]);
    return out;
  }
  std::vector<double> boundary_probs() const {
    std::vector<double> out;
    for (size_t i = 0; i < pred.size(); ++i)
      if (pred[i]) out.push_back(probs[i]);
    return out;
  }
};

struct TemporalFeature {
  double dev_x = 0.0, dev_y = 0.0;
  double prev_prob = 0.5;
};

/// Deviation of each current point from the motion-compensated previous
/// boundary detection: the xy vector from the nearest compensated boundary
/// point to the current point, plus that neighbor's probability. With no
/// previous detection (or an empty boundary set) returns (0, 0, 0.5).
std::vector<TemporalFeature> deviation_features(const std::vector<Vec3>& curr_coords,
                                                const Detection* prev, const EgoPose& pose_prev,
                                                const EgoPose& pose_curr);

void attach_temporal(prep::FeatureCloud& cloud, const std::vector<TemporalFeature>& feats);

/// Sequential inference over a time-ordered frame sequence: preprocess,
/// attach deviation features from the previous detection, forward, threshold.
/// With temporal_ablation the deviation features stay at their defaults
/// every frame (equivalent to stateless per-frame inference).
std::vector<Detection> run_sequence(const SegModel& model, const std::vector<RadarFrame>& frames,
                                    const prep::FilterConfig& filter_cfg = {},
                                    bool temporal_ablation = false);

}  // namespace rbd::seg
