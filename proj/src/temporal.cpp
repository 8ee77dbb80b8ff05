#include "rbd/seg/temporal.hpp"

#include "rbd/core/geometry.hpp"
#include "rbd/core/metrics.hpp"

#include <stdexcept>

namespace rbd::seg {

std::vector<TemporalFeature> deviation_features(const std::vector<Vec3>& curr_coords,
                                                const Detection* prev, const EgoPose& pose_prev,
                                                const EgoPose& pose_curr) {
  std::vector<TemporalFeature> out(curr_coords.size());
  if (!prev) return out;
  const std::vector<Vec3> boundary = prev->boundary_coords();
  if (boundary.empty()) return out;
  const std::vector<double> probs = prev->boundary_probs();

  std::vector<Vec2> compensated;
  compensated.reserve(boundary.size());
  for (const Vec3& p : boundary)
    compensated.push_back(motion_compensate(p, pose_prev, pose_curr).head<2>());

  for (size_t i = 0; i < curr_coords.size(); ++i) {
    const Vec2 q = curr_coords[i].head<2>();
    const auto nn = nearest_neighbor(q, compensated);
    out[i].dev_x = nn.offset.x();
    out[i].dev_y = nn.offset.y();
    out[i].prev_prob = probs[nn.index];
  }
  return out;
}

void attach_temporal(prep::FeatureCloud& cloud, const std::vector<TemporalFeature>& feats) {
  if (feats.size() != cloud.size())
    throw std::invalid_argument("attach_temporal: length mismatch");
  for (size_t i = 0; i < feats.size(); ++i) {
    cloud.pts[i].dev_x = feats[i].dev_x;
    cloud.pts[i].dev_y = feats[i].dev_y;
    cloud.pts[i].prev_prob = feats[i].prev_prob;
  }
}

std::vector<Detection> run_sequence(const SegModel& model, const std::vector<RadarFrame>& frames,
                                    const prep::FilterConfig& filter_cfg,
                                    bool temporal_ablation) {
  for (size_t i = 1; i < frames.size(); ++i)
    if (frames[i].timestamp <= frames[i - 1].timestamp)
      throw std::invalid_argument("run_sequence: frames out of order");

  std::vector<Detection> detections;
  detections.reserve(frames.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    prep::FeatureCloud cloud = prep::preprocess_window(
        frames[i], i >= 1 ? &frames[i - 1] : nullptr, i >= 2 ? &frames[i - 2] : nullptr,
        filter_cfg);

    Detection det;
    det.pose = frames[i].ego.pose;
    if (!cloud.empty()) {
      if (!temporal_ablation && i >= 1) {
        const auto feats = deviation_features(cloud.coords(), &detections.back(),
                                              frames[i - 1].ego.pose, frames[i].ego.pose);
        attach_temporal(cloud, feats);
      }
      const Eigen::VectorXd probs = seg_forward(model, cloud);
      det.coords = cloud.coords();
      det.probs.assign(probs.data(), probs.data() + probs.size());
      det.pred.resize(probs.size());
      for (Eigen::Index j = 0; j < probs.size(); ++j) det.pred[j] = probs(j) > 0.5 ? 1 : 0;
    }
    detections.push_back(std::move(det));
  }
  return detections;
}

}  // namespace rbd::seg
