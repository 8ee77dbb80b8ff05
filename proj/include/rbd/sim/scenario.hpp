#pragma once

#include "rbd/core/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rbd::sim {

/// World-frame boundary structure (fence, curb, barrier): an xy polyline
/// with a height band the scatterers live in.
struct Polyline {
  std::vector<Vec2> pts;  // >= 2 vertices, non-self-intersecting
  double z_lo = 0.2;
  double z_hi = 1.2;
};

double arc_length(const Polyline& line);
Vec2 point_at_arc(const Polyline& line, double s);
Vec2 tangent_at_arc(const Polyline& line, double s);
/// xy distance from a point to the polyline (min over segments).
double distance_xy(const Polyline& line, const Vec2& p);

/// A dynamic object following a path at constant speed.
struct Mover {
  std::vector<Vec2> path;  // world xy
  double speed = 8.0;      // m/s along path
  double length = 4.0;     // extent along path direction
  double width = 1.8;      // extent across
  int returns_per_frame = 6;
};

/// Ground-truth world; everything the renderer needs to synthesize frames.
struct Scenario {
  std::vector<Polyline> boundaries;
  std::vector<EgoState> ego_trajectory;  // sampled at 10 Hz
  double t0 = 0.0;
  double dt = 0.1;
  std::vector<Mover> movers;
  std::vector<Vec3> overheads;  // world positions, z > 3 m
  double ghost_rate = 25.0;     // expected ghost points per frame
  std::uint64_t seed = 0;

  double t_end() const { return t0 + dt * static_cast<double>(ego_trajectory.size() - 1); }
};

enum class ScenarioKind { straight, curved, fork, intersection, urban };

ScenarioKind parse_scenario_kind(const std::string& name);  // throws on unknown kind
std::string to_string(ScenarioKind kind);

/// Deterministic for fixed (kind, seed).
Scenario build_scenario(ScenarioKind kind, std::uint64_t seed);

/// Radar realism knobs.
struct RadarModel {
  double max_range = 80.0;                  // m
  double azimuth_fov = 60.0 * M_PI / 180.0; // rad, half-angle about +y
  double pos_noise_lateral = 0.15;          // m, sigma for x and y
  double pos_noise_vertical = 0.3;          // m, sigma for z
  double doppler_noise = 0.2;               // m/s, sigma
  double snr_base = 30.0;                   // dB at zero range
  double snr_per_meter = 0.25;              // dB lost per meter of range
  double snr_noise = 2.0;                   // dB, sigma
  double boundary_sample_spacing = 1.0;     // m between scatterer stations
  double dropout_prob = 0.3;                // per boundary sample per frame

  /// Scale the stochastic knobs (used by the sensitivity sweep).
  RadarModel scaled_noise(double factor) const {
    RadarModel m = *this;
    m.pos_noise_lateral *= factor;
    m.pos_noise_vertical *= factor;
    m.doppler_noise *= factor;
    m.snr_noise *= factor;
    m.dropout_prob = std::min(0.95, m.dropout_prob * factor);
    return m;
  }
};

}  // namespace rbd::sim
