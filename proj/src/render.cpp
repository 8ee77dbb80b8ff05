#include "rbd/sim/render.hpp"

#include "rbd/core/geometry.hpp"
#include "rbd/util/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rbd::sim {

namespace {

int trajectory_index(const Scenario& sc, double t) {
  const double rel = (t - sc.t0) / sc.dt;
  const int i = static_cast<int>(std::lround(rel));
  if (i < 0 || i >= static_cast<int>(sc.ego_trajectory.size()) ||
      std::abs(rel - i) > 1e-6)
    throw std::out_of_range("t out of range of the ego trajectory");
  return i;
}

struct Emitter {
  const RadarModel& radar;
  const EgoState& ego;
  std::mt19937_64& rng;
  RenderedFrame& out;
  std::normal_distribution<double> gauss{0.0, 1.0};

  Vec2 ego_velocity_world() const {
    const double c = std::cos(ego.pose.yaw), s = std::sin(ego.pose.yaw);
    return {-s * ego.speed, c * ego.speed};
  }

  bool in_fov(const Vec3& p) const {
    if (p.norm() > radar.max_range) return false;
    if (p.y() <= 1e-6) return false;
    return std::abs(std::atan2(p.x(), p.y())) <= radar.azimuth_fov;
  }

  double snr_at(double range) {
    return std::max(0.0, radar.snr_base - radar.snr_per_meter * range +
                             radar.snr_noise * gauss(rng));
  }

  // True world position + world velocity of the reflector -> one return.
  void emit(const Vec3& world_pos, const Vec2& vel_world, PointSource source,
            int boundary_idx) {
    const Vec3 true_ego = world_to_ego(world_pos, ego.pose);
    const double r2d = true_ego.head<2>().norm();
    if (r2d < 1e-9) return;
    // Radial geometry from the true position; receding positive.
    const Vec2 rel_vel = vel_world - ego_velocity_world();
    const Vec2 r_hat = (world_pos.head<2>() - Vec2(ego.pose.x, ego.pose.y)) / r2d;
    double doppler = rel_vel.dot(r_hat) + radar.doppler_noise * gauss(rng);

    Vec3 meas = true_ego;
    meas.x() += radar.pos_noise_lateral * gauss(rng);
    meas.y() += radar.pos_noise_lateral * gauss(rng);
    meas.z() += radar.pos_noise_vertical * gauss(rng);
    if (!in_fov(meas)) return;

    out.frame.points.push_back(make_radar_point(meas, doppler, snr_at(meas.norm())));
    out.sources.push_back(source);
    out.source_boundary.push_back(boundary_idx);
  }
};

}  // namespace

RenderedFrame render_frame(const Scenario& scenario, double t, const RadarModel& radar,
                           std::mt19937_64& rng) {
  const int idx = trajectory_index(scenario, t);
  const EgoState& ego = scenario.ego_trajectory[idx];

  RenderedFrame out;
  out.frame.timestamp = t;
  out.frame.ego = ego;

  Emitter em{radar, ego, rng, out};
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Boundary scatterer stations (fixed along each polyline).
  for (int b = 0; b < static_cast<int>(scenario.boundaries.size()); ++b) {
    const Polyline& line = scenario.boundaries[b];
    const double total = arc_length(line);
    for (double s = 0.0; s <= total; s += radar.boundary_sample_spacing) {
      const Vec2 xy = point_at_arc(line, s);
      // Cheap pre-gate so RNG is not consumed for stations far out of view.
      const Vec3 rough = world_to_ego({xy.x(), xy.y(), 0.0}, ego.pose);
      if (rough.head<2>().norm() > radar.max_range + 6.0 || rough.y() < -6.0) continue;
      if (u01(rng) < radar.dropout_prob) continue;
      const double z = line.z_lo + (line.z_hi - line.z_lo) * u01(rng);
      em.emit({xy.x(), xy.y(), z}, Vec2::Zero(), PointSource::boundary, b);
    }
  }

  // Movers: per-frame uniform samples over the body rectangle.
  for (const Mover& m : scenario.movers) {
    Polyline path;
    path.pts = m.path;
    const double arc = m.speed * (t - scenario.t0);
    if (arc < 0.0 || arc > arc_length(path)) continue;
    const Vec2 center = point_at_arc(path, arc);
    const Vec2 u = tangent_at_arc(path, arc);
    const Vec2 n(u.y(), -u.x());
    const Vec2 vel = m.speed * u;
    for (int i = 0; i < m.returns_per_frame; ++i) {
      const Vec2 offset = (u01(rng) - 0.5) * m.length * u + (u01(rng) - 0.5) * m.width * n;
      const double z = 0.3 + 1.2 * u01(rng);
      const Vec2 xy = center + offset;
      em.emit({xy.x(), xy.y(), z}, vel, PointSource::mover, -1);
    }
  }

  // Overhead structures (static, z > 3 m): pass the Doppler test, fail height.
  for (const Vec3& o : scenario.overheads) {
    const int n_ret = 1 + (u01(rng) < 0.5 ? 1 : 0);
    for (int i = 0; i < n_ret; ++i) em.emit(o, Vec2::Zero(), PointSource::overhead, -1);
  }

  // Ghosts: uniform in FOV, uniform Doppler in [-15, 15] m/s.
  std::poisson_distribution<int> ghost_count(scenario.ghost_rate);
  std::uniform_real_distribution<double> az(-radar.azimuth_fov, radar.azimuth_fov);
  std::uniform_real_distribution<double> gr(2.0, radar.max_range * 0.98);
  std::uniform_real_distribution<double> gz(-1.2, 3.2);
  std::uniform_real_distribution<double> gd(-15.0, 15.0);
  std::uniform_real_distribution<double> gsnr(5.0, 20.0);
  const int n_ghost = ghost_count(rng);
  for (int i = 0; i < n_ghost; ++i) {
    const double a = az(rng), r = gr(rng);
    const Vec3 p(r * std::sin(a), r * std::cos(a), gz(rng));
    if (p.norm() > radar.max_range) continue;
    out.frame.points.push_back(make_radar_point(p, gd(rng), gsnr(rng)));
    out.sources.push_back(PointSource::ghost);
    out.source_boundary.push_back(-1);
  }

  out.frame.labels = label_points(out, scenario);
  return out;
}

std::vector<int> label_points(const RenderedFrame& rendered, const Scenario& scenario,
                              double tau) {
  if (tau <= 0.0) throw std::invalid_argument("tau must be > 0");
  const auto& pts = rendered.frame.points;
  std::vector<int> labels(pts.size(), 0);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (rendered.sources[i] != PointSource::boundary) continue;
    const int b = rendered.source_boundary[i];
    const Vec3 world = ego_to_world(pts[i].position(), rendered.frame.ego.pose);
    if (distance_xy(scenario.boundaries[b], world.head<2>()) <= tau) labels[i] = 1;
  }
  return labels;
}

std::vector<RadarFrame> render_sequence(const Scenario& scenario, const RadarModel& radar,
                                        int n_frames, std::uint64_t seed) {
  std::vector<RadarFrame> frames;
  frames.reserve(n_frames);
  for (int i = 0; i < n_frames; ++i) {
    auto rng = substream(seed, Stream::sim, 1000 + static_cast<std::uint64_t>(i));
    frames.push_back(
        render_frame(scenario, scenario.t0 + scenario.dt * i, radar, rng).frame);
  }
  return frames;
}

}  // namespace rbd::sim
