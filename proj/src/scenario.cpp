#include "rbd/sim/scenario.hpp"

#include "rbd/core/geometry.hpp"
#include "rbd/util/rng.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace rbd::sim {

double arc_length(const Polyline& line) {
  double s = 0.0;
  for (size_t i = 1; i < line.pts.size(); ++i) s += (line.pts[i] - line.pts[i - 1]).norm();
  return s;
}

Vec2 point_at_arc(const Polyline& line, double s) {
  if (line.pts.size() < 2) throw std::invalid_argument("polyline needs >= 2 vertices");
  if (s <= 0.0) return line.pts.front();
  for (size_t i = 1; i < line.pts.size(); ++i) {
    const double seg = (line.pts[i] - line.pts[i - 1]).norm();
    if (s <= seg || i + 1 == line.pts.size()) {
      const double u = seg > 0 ? std::min(1.0, s / seg) : 0.0;
      return line.pts[i - 1] + u * (line.pts[i] - line.pts[i - 1]);
    }
    s -= seg;
  }
  return line.pts.back();
}

Vec2 tangent_at_arc(const Polyline& line, double s) {
  if (line.pts.size() < 2) throw std::invalid_argument("polyline needs >= 2 vertices");
  double acc = 0.0;
  for (size_t i = 1; i < line.pts.size(); ++i) {
    const double seg = (line.pts[i] - line.pts[i - 1]).norm();
    if ((s <= acc + seg && seg > 0) || i + 1 == line.pts.size())
      return (line.pts[i] - line.pts[i - 1]).normalized();
    acc += seg;
  }
  return (line.pts.back() - line.pts[line.pts.size() - 2]).normalized();
}

double distance_xy(const Polyline& line, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < line.pts.size(); ++i) {
    const Vec2 a = line.pts[i - 1], b = line.pts[i];
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double u = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (p - (a + u * ab)).norm());
  }
  return best;
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "straight") return ScenarioKind::straight;
  if (name == "curved") return ScenarioKind::curved;
  if (name == "fork") return ScenarioKind::fork;
  if (name == "intersection") return ScenarioKind::intersection;
  if (name == "urban") return ScenarioKind::urban;
  throw std::invalid_argument("unknown scenario kind: " + name);
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::straight: return "straight";
    case ScenarioKind::curved: return "curved";
    case ScenarioKind::fork: return "fork";
    case ScenarioKind::intersection: return "intersection";
    case ScenarioKind::urban: return "urban";
  }
  return "?";
}

namespace {

constexpr double kTrajectorySeconds = 60.0;

// yaw such that the vehicle's forward (+y) axis points along world tangent t.
double yaw_from_tangent(const Vec2& t) { return std::atan2(-t.x(), t.y()); }

Polyline straight_line(double x, double y_from, double y_to, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lo(0.2, 0.5), span(0.3, 0.7);
  Polyline line;
  line.z_lo = lo(rng);
  line.z_hi = std::min(1.2, line.z_lo + span(rng));
  line.pts = {{x, y_from}, {x, y_to}};
  return line;
}

// Straight ego run along +y from the origin.
std::vector<EgoState> straight_trajectory(double speed, double seconds) {
  std::vector<EgoState> traj;
  const int n = static_cast<int>(seconds * 10.0) + 1;
  traj.reserve(n);
  for (int i = 0; i < n; ++i) {
    EgoState st;
    st.pose = {0.0, speed * 0.1 * i, 0.0};
    st.speed = speed;
    st.yaw_rate = 0.0;
    traj.push_back(st);
  }
  return traj;
}

// Trajectory following a dense centerline polyline at constant speed.
std::vector<EgoState> path_trajectory(const Polyline& center, double speed, double seconds) {
  std::vector<EgoState> traj;
  const int n = static_cast<int>(seconds * 10.0) + 1;
  traj.reserve(n);
  double prev_yaw = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = speed * 0.1 * i;
    const Vec2 p = point_at_arc(center, s);
    const Vec2 t = tangent_at_arc(center, s);
    EgoState st;
    st.pose = {p.x(), p.y(), yaw_from_tangent(t)};
    st.speed = speed;
    st.yaw_rate = i == 0 ? 0.0 : normalize_angle(st.pose.yaw - prev_yaw) / 0.1;
    prev_yaw = st.pose.yaw;
    traj.push_back(st);
  }
  return traj;
}

void add_traffic(Scenario& sc, std::mt19937_64& rng, double road_len, bool oncoming,
                 bool same_direction, int pedestrians) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  if (oncoming) {
    const int cars = 2 + static_cast<int>(u01(rng) * 3);
    for (int i = 0; i < cars; ++i) {
      Mover m;
      const double y0 = 40.0 + u01(rng) * (road_len - 20.0);
      m.path = {{-2.0, y0}, {-2.0, y0 - (road_len + 120.0)}};
      m.speed = 8.0 + u01(rng) * 7.0;
      sc.movers.push_back(m);
    }
  }
  if (same_direction) {
    const int cars = 1 + static_cast<int>(u01(rng) * 2);
    for (int i = 0; i < cars; ++i) {
      Mover m;
      const double y0 = 15.0 + u01(rng) * 30.0;
      m.path = {{2.0, y0}, {2.0, y0 + road_len + 120.0}};
      m.speed = 11.0 + u01(rng) * 5.0;
      sc.movers.push_back(m);
    }
  }
  for (int i = 0; i < pedestrians; ++i) {
    Mover m;
    const double side = u01(rng) < 0.5 ? -5.5 : 5.5;
    const double y0 = u01(rng) * road_len;
    const double dir = u01(rng) < 0.5 ? -1.0 : 1.0;
    m.path = {{side, y0}, {side, y0 + dir * 60.0}};
    m.speed = 0.8 + u01(rng) * 0.7;
    m.length = 0.5;
    m.width = 0.5;
    m.returns_per_frame = 2;
    sc.movers.push_back(m);
  }
}

void add_gantries(Scenario& sc, std::mt19937_64& rng, double road_len, double spacing = 45.0) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (double y = 25.0 + u01(rng) * 10.0; y < road_len + 80.0; y += spacing)
    sc.overheads.push_back({-3.0 + 6.0 * u01(rng), y, 4.0 + 2.0 * u01(rng)});
}

Scenario build_straight(std::mt19937_64& rng) {
  Scenario sc;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double speed = 8.0 + 4.0 * u01(rng);
  const double road_len = speed * kTrajectorySeconds;
  sc.ego_trajectory = straight_trajectory(speed, kTrajectorySeconds);
  sc.boundaries.push_back(straight_line(-4.0, -20.0, road_len + 100.0, rng));
  sc.boundaries.push_back(straight_line(4.0, -20.0, road_len + 100.0, rng));
  add_traffic(sc, rng, road_len, true, true, 3);
  add_gantries(sc, rng, road_len);
  sc.ghost_rate = 35.0;
  return sc;
}

Scenario build_curved(std::mt19937_64& rng) {
  Scenario sc;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double speed = 7.0 + 3.0 * u01(rng);
  const double amp = 4.0 + 3.0 * u01(rng);
  const double wavelen = 100.0 + 60.0 * u01(rng);
  const double road_len = speed * kTrajectorySeconds;

  Polyline center;
  center.pts.reserve(static_cast<size_t>(road_len + 141));
  for (double y = -20.0; y <= road_len + 120.0; y += 1.0)
    center.pts.push_back({amp * std::sin(2.0 * M_PI * y / wavelen), y});

  // Offset curves at +-4 m along the centerline normal.
  auto offset_curve = [&](double off) {
    Polyline line = straight_line(0, 0, 1, rng);  // reuse the height-band draw
    line.pts.clear();
    double s = 0.0;
    const double total = arc_length(center);
    while (s <= total) {
      const Vec2 p = point_at_arc(center, s);
      const Vec2 t = tangent_at_arc(center, s);
      const Vec2 right(t.y(), -t.x());
      line.pts.push_back(p + off * right);
      s += 1.0;
    }
    return line;
  };
  sc.boundaries.push_back(offset_curve(-4.0));
  sc.boundaries.push_back(offset_curve(4.0));
  sc.ego_trajectory = path_trajectory(center, speed, kTrajectorySeconds);
  add_traffic(sc, rng, road_len, false, false, 3);
  add_gantries(sc, rng, road_len, 60.0);
  sc.ghost_rate = 35.0;
  return sc;
}

Scenario build_fork(std::mt19937_64& rng) {
  Scenario sc;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double speed = 8.0 + 3.0 * u01(rng);
  const double y_fork = 30.0 + 20.0 * u01(rng);
  const double theta = (10.0 + 5.0 * u01(rng)) * M_PI / 180.0;
  const double road_len = speed * kTrajectorySeconds;
  const double branch_len = road_len + 120.0;

  const Vec2 u_l(-std::sin(theta), std::cos(theta));
  const Vec2 u_r(std::sin(theta), std::cos(theta));
  const Vec2 n_l(u_l.y(), -u_l.x());  // right normal of the left branch
  const Vec2 n_r(u_r.y(), -u_r.x());
  const Vec2 nose(0.0, y_fork);

  auto branch_edge = [&](const Vec2& dir, const Vec2& normal, double off, double s0,
                         double s1) {
    std::vector<Vec2> pts;
    for (double s = s0; s <= s1; s += 4.0) pts.push_back(nose + s * dir + off * normal);
    return pts;
  };

  // Outer left: straight wall, then the left branch's left edge.
  Polyline left = straight_line(-4.0, -20.0, y_fork, rng);
  for (const Vec2& p : branch_edge(u_l, n_l, -4.0, 4.0, branch_len)) left.pts.push_back(p);
  // Outer right: straight wall, then the right branch's right edge.
  Polyline right = straight_line(4.0, -20.0, y_fork, rng);
  for (const Vec2& p : branch_edge(u_r, n_r, 4.0, 4.0, branch_len)) right.pts.push_back(p);
  // Middle divider: V along the inner edges, meeting at the wedge nose.
  const double s_nose = 4.0 / std::tan(theta);
  Polyline middle = straight_line(0, 0, 1, rng);
  middle.pts.clear();
  {
    auto down = branch_edge(u_l, n_l, 4.0, s_nose, branch_len);
    std::reverse(down.begin(), down.end());
    middle.pts = down;
    for (const Vec2& p : branch_edge(u_r, n_r, -4.0, s_nose + 4.0, branch_len))
      middle.pts.push_back(p);
  }
  sc.boundaries = {left, middle, right};

  // Ego takes the right branch.
  Polyline ego_path;
  ego_path.pts = {{0.0, -1.0}, nose};
  for (double s = 4.0; s <= branch_len; s += 4.0) ego_path.pts.push_back(nose + s * u_r);
  sc.ego_trajectory = path_trajectory(ego_path, speed, kTrajectorySeconds);

  add_gantries(sc, rng, road_len, 40.0);
  sc.ghost_rate = 35.0;
  return sc;
}

// Straight road whose boundary walls break for a crossing street:
// a designed 7 m longitudinal gap on both sides.
Scenario build_intersection(std::mt19937_64& rng, double* junction_y = nullptr) {
  Scenario sc;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double speed = 7.0 + 3.0 * u01(rng);
  const double y_cross = 35.0 + 20.0 * u01(rng);
  const double half_gap = 3.5;
  const double road_len = speed * kTrajectorySeconds;
  if (junction_y) *junction_y = y_cross;

  for (double x : {-4.0, 4.0}) {
    sc.boundaries.push_back(straight_line(x, -20.0, y_cross - half_gap, rng));
    sc.boundaries.push_back(straight_line(x, y_cross + half_gap, road_len + 100.0, rng));
  }
  sc.ego_trajectory = straight_trajectory(speed, kTrajectorySeconds);

  // Crossing traffic through the junction.
  const int cars = 2 + static_cast<int>(u01(rng) * 2);
  for (int i = 0; i < cars; ++i) {
    Mover m;
    const double dir = u01(rng) < 0.5 ? 1.0 : -1.0;
    const double x0 = -dir * (30.0 + 50.0 * u01(rng));
    m.path = {{x0, y_cross}, {x0 + dir * 220.0, y_cross}};
    m.speed = 6.0 + 4.0 * u01(rng);
    sc.movers.push_back(m);
  }
  sc.overheads.push_back({0.0, y_cross, 5.0});  // signal head over the junction
  add_gantries(sc, rng, road_len, 55.0);
  sc.ghost_rate = 35.0;
  return sc;
}

Scenario build_urban(std::mt19937_64& rng) {
  // Intersection layout plus median barrier segments and heavier clutter.
  double y_cross = 0.0;
  Scenario sc = build_intersection(rng, &y_cross);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  sc.boundaries.push_back(straight_line(-0.5, 8.0, y_cross - 10.0, rng));
  sc.boundaries.push_back(straight_line(-0.5, y_cross + 10.0,
                                        sc.ego_trajectory.back().pose.y + 80.0, rng));
  add_traffic(sc, rng, sc.ego_trajectory.back().pose.y, true, false, 4);
  sc.ghost_rate = 45.0;
  return sc;
}

}  // namespace

Scenario build_scenario(ScenarioKind kind, std::uint64_t seed) {
  auto rng = substream(seed, Stream::sim, 0x5ce0 + static_cast<std::uint64_t>(kind));
  Scenario sc;
  switch (kind) {
    case ScenarioKind::straight: sc = build_straight(rng); break;
    case ScenarioKind::curved: sc = build_curved(rng); break;
    case ScenarioKind::fork: sc = build_fork(rng); break;
    case ScenarioKind::intersection: sc = build_intersection(rng); break;
    case ScenarioKind::urban: sc = build_urban(rng); break;
  }
  sc.seed = seed;
  return sc;
}

}  // namespace rbd::sim
