#pragma once

#include "rbd/core/types.hpp"

#include <vector>

namespace rbd {

/// Ego -> world: planar rotation by yaw, then translation. z carried through.
inline Vec3 ego_to_world(const Vec3& p, const EgoPose& pose) {
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  return {pose.x + c * p.x() - s * p.y(), pose.y + s * p.x() + c * p.y(), p.z()};
}

inline Vec3 world_to_ego(const Vec3& p, const EgoPose& pose) {
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  const double dx = p.x() - pose.x, dy = p.y() - pose.y;
  return {c * dx + s * dy, -s * dx + c * dy, p.z()};
}

/// Re-express points captured in the ego frame at pose_prev in the ego
/// frame at pose_curr. Static world points land where the current radar
/// would see them.
inline Vec3 motion_compensate(const Vec3& p, const EgoPose& pose_prev,
                              const EgoPose& pose_curr) {
  return world_to_ego(ego_to_world(p, pose_prev), pose_curr);
}

inline std::vector<Vec3> motion_compensate(const std::vector<Vec3>& pts,
                                           const EgoPose& pose_prev,
                                           const EgoPose& pose_curr) {
  std::vector<Vec3> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(motion_compensate(p, pose_prev, pose_curr));
  return out;
}

}  // namespace rbd
