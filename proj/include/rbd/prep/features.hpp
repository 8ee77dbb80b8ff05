#pragma once

#include "rbd/core/geometry.hpp"
#include "rbd/prep/filters.hpp"

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <vector>

namespace rbd::prep {

/// One fused point-wise feature row. Order of the 12 network features:
/// x, y, z, doppler, snr, range, ego_speed, yaw_rate, frame_index,
/// dev_x, dev_y, prev_prob.
struct FeaturePoint {
  double x = 0, y = 0, z = 0;
  double doppler = 0, snr = 0, range = 0;
  double ego_speed = 0, yaw_rate = 0;
  int frame_index = 0;  // 0 current, 1 previous, 2 before that
  double dev_x = 0.0, dev_y = 0.0;
  double prev_prob = 0.5;
  std::optional<int> label;

  Vec3 position() const { return {x, y, z}; }
};

struct FeatureCloud {
  std::vector<FeaturePoint> pts;

  size_t size() const { return pts.size(); }
  bool empty() const { return pts.empty(); }

  std::vector<Vec3> coords() const {
    std::vector<Vec3> c;
    c.reserve(pts.size());
    for (const auto& p : pts) c.push_back(p.position());
    return c;
  }

  /// 12 x n feature matrix in the documented order.
  Eigen::MatrixXd feature_matrix() const {
    Eigen::MatrixXd f(12, pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      f.col(i) << p.x, p.y, p.z, p.doppler, p.snr, p.range, p.ego_speed, p.yaw_rate,
          static_cast<double>(p.frame_index), p.dev_x, p.dev_y, p.prev_prob;
    }
    return f;
  }

  /// xy coordinates of ground-truth boundary rows (label == 1).
  std::vector<Vec2> gt_boundary_xy() const {
    std::vector<Vec2> out;
    for (const auto& p : pts)
      if (p.label && *p.label == 1) out.push_back({p.x, p.y});
    return out;
  }

  bool fully_labeled() const {
    for (const auto& p : pts)
      if (!p.label) return false;
    return true;
  }
};

/// Fuse up to three consecutive frames into one feature cloud. Previous-frame
/// positions are motion-compensated into the current ego frame; doppler, snr
/// and range are carried unchanged from their source frame (frame_index marks
/// the staleness); the current frame's ego speed / yaw rate is attached to
/// every row.
inline FeatureCloud fuse_frames(const RadarFrame& curr, const RadarFrame* prev1 = nullptr,
                                const RadarFrame* prev2 = nullptr) {
  if (prev1 && prev1->timestamp >= curr.timestamp)
    throw std::invalid_argument("fuse_frames: frames out of order");
  if (prev2 && (!prev1 || prev2->timestamp >= prev1->timestamp))
    throw std::invalid_argument("fuse_frames: frames out of order");

  FeatureCloud cloud;
  auto add = [&](const RadarFrame& f, int frame_index) {
    for (size_t i = 0; i < f.points.size(); ++i) {
      const RadarPoint& p = f.points[i];
      Vec3 pos = p.position();
      if (frame_index > 0) pos = motion_compensate(pos, f.ego.pose, curr.ego.pose);
      FeaturePoint row;
      row.x = pos.x();
      row.y = pos.y();
      row.z = pos.z();
      row.doppler = p.doppler;
      row.snr = p.snr;
      row.range = p.range;
      row.ego_speed = curr.ego.speed;
      row.yaw_rate = curr.ego.yaw_rate;
      row.frame_index = frame_index;
      if (f.labels) row.label = (*f.labels)[i];
      cloud.pts.push_back(row);
    }
  };
  add(curr, 0);
  if (prev1) add(*prev1, 1);
  if (prev2) add(*prev2, 2);
  return cloud;
}

/// Mirror a frame across the vehicle's longitudinal axis: x -> -x for every
/// point, yaw_rate -> -yaw_rate. The ego world pose is mirrored consistently
/// (x_world -> -x_world, yaw -> -yaw) so that fusing flipped frames equals
/// flipping the fused result. Involution.
inline RadarFrame flip_augment(const RadarFrame& f) {
  RadarFrame out = f;
  for (auto& p : out.points) p.x = -p.x;
  out.ego.pose.x = -out.ego.pose.x;
  out.ego.pose.yaw = normalize_angle(-out.ego.pose.yaw);
  out.ego.yaw_rate = -out.ego.yaw_rate;
  return out;
}

/// Full preprocessing for one step: physics-filter each available frame
/// against its own ego state, then fuse.
inline FeatureCloud preprocess_window(const RadarFrame& curr, const RadarFrame* prev1,
                                      const RadarFrame* prev2, const FilterConfig& cfg = {}) {
  const RadarFrame fc = physics_filter(curr, cfg);
  std::optional<RadarFrame> f1, f2;
  if (prev1) f1 = physics_filter(*prev1, cfg);
  if (prev2) f2 = physics_filter(*prev2, cfg);
  return fuse_frames(fc, f1 ? &*f1 : nullptr, f2 ? &*f2 : nullptr);
}

}  // namespace rbd::prep
