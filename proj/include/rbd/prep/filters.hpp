#pragma once

#include "rbd/core/types.hpp"

#include <stdexcept>
#include <vector>

namespace rbd::prep {

/// Physical-constraint thresholds. Intervals are closed: a point exactly at
/// a threshold survives.
struct FilterConfig {
  double z_max = 3.0;             // m, above: overhead structures
  double z_min = -1.5;            // m, below: elevation glitches / ghosts
  double doppler_dev_max = 1.0;   // m/s allowed deviation from static expectation
};

/// Expected Doppler of a static reflector at the point's bearing,
/// receding-positive: -ego_speed * y / sqrt(x^2 + y^2).
inline double expected_static_doppler(const RadarPoint& p, double ego_speed) {
  const double r2d = std::hypot(p.x, p.y);
  if (r2d <= 0.0) throw std::domain_error("degenerate bearing");
  return -ego_speed * p.y / r2d;
}

namespace detail {
template <class Pred>
RadarFrame select(const RadarFrame& f, Pred keep) {
  RadarFrame out;
  out.timestamp = f.timestamp;
  out.ego = f.ego;
  if (f.labels) out.labels.emplace();
  for (size_t i = 0; i < f.points.size(); ++i) {
    if (!keep(f.points[i])) continue;
    out.points.push_back(f.points[i]);
    if (f.labels) out.labels->push_back((*f.labels)[i]);
  }
  return out;
}
}  // namespace detail

inline std::vector<RadarPoint> height_filter(const std::vector<RadarPoint>& pts,
                                             const FilterConfig& cfg = {}) {
  std::vector<RadarPoint> out;
  for (const auto& p : pts)
    if (p.z >= cfg.z_min && p.z <= cfg.z_max) out.push_back(p);
  return out;
}

inline RadarFrame height_filter(const RadarFrame& f, const FilterConfig& cfg = {}) {
  return detail::select(f, [&](const RadarPoint& p) { return p.z >= cfg.z_min && p.z <= cfg.z_max; });
}

/// Keep points whose measured Doppler is within doppler_dev_max of the static
/// expectation. Degenerate-bearing points (x=y=0) are retained untouched.
inline bool doppler_plausible(const RadarPoint& p, double ego_speed, const FilterConfig& cfg) {
  const double r2d = std::hypot(p.x, p.y);
  if (r2d <= 0.0) return true;
  return std::abs(p.doppler - (-ego_speed * p.y / r2d)) <= cfg.doppler_dev_max;
}

inline std::vector<RadarPoint> doppler_filter(const std::vector<RadarPoint>& pts,
                                              const EgoState& ego, const FilterConfig& cfg = {}) {
  std::vector<RadarPoint> out;
  for (const auto& p : pts)
    if (doppler_plausible(p, ego.speed, cfg)) out.push_back(p);
  return out;
}

inline RadarFrame doppler_filter(const RadarFrame& f, const FilterConfig& cfg = {}) {
  return detail::select(f, [&](const RadarPoint& p) { return doppler_plausible(p, f.ego.speed, cfg); });
}

/// Height filter, then Doppler filter, each against the frame's own ego state.
inline RadarFrame physics_filter(const RadarFrame& f, const FilterConfig& cfg = {}) {
  return doppler_filter(height_filter(f, cfg), cfg);
}

}  // namespace rbd::prep
