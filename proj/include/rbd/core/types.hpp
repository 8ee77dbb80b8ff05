#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <vector>

namespace rbd {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Normalize an angle to (-pi, pi].
inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);  // lands in [-pi, pi]
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

/// Planar ego pose. yaw is counter-clockwise; at yaw=0 the vehicle's
/// forward (+y) axis is aligned with the world +y axis.
struct EgoPose {
  double x = 0.0;    // m, world
  double y = 0.0;    // m, world
  double yaw = 0.0;  // rad, normalized to (-pi, pi]
};

struct EgoState {
  EgoPose pose;
  double speed = 0.0;     // m/s, >= 0, forward along vehicle +y
  double yaw_rate = 0.0;  // rad/s
};

/// One radar return in the ego frame (x right, y forward, z up).
/// Doppler is the signed range rate, positive = receding.
struct RadarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double doppler = 0.0;  // m/s
  double snr = 0.0;      // dB
  double range = 0.0;    // m, sqrt(x^2+y^2+z^2)

  Vec3 position() const { return {x, y, z}; }
  Vec2 position_xy() const { return {x, y}; }
};

inline RadarPoint make_radar_point(const Vec3& p, double doppler, double snr) {
  return {p.x(), p.y(), p.z(), doppler, snr, p.norm()};
}

/// A timestamped set of returns plus the ego state that produced them.
/// labels, when present, align 1:1 with points (1 = road boundary).
struct RadarFrame {
  double timestamp = 0.0;  // s
  EgoState ego;
  std::vector<RadarPoint> points;
  std::optional<std::vector<int>> labels;
};

}  // namespace rbd
