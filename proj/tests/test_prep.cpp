#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rbd/prep/features.hpp"
#include "rbd/sim/render.hpp"
#include "rbd/util/rng.hpp"
#include "support.hpp"

using namespace rbd;
using namespace rbd::prep;

namespace {

RadarPoint pt(double x, double y, double z, double doppler = 0.0) {
  RadarPoint p{x, y, z, doppler, 10.0, 0.0};
  p.range = std::sqrt(x * x + y * y + z * z);
  return p;
}

RadarFrame frame_at(double t, double speed, std::vector<RadarPoint> pts,
                    std::vector<int> labels = {}) {
  RadarFrame f;
  f.timestamp = t;
  f.ego.pose = {0, 0, 0};
  f.ego.speed = speed;
  f.points = std::move(pts);
  if (!labels.empty()) f.labels = std::move(labels);
  return f;
}

}  // namespace

TEST_CASE("height_filter removes overpasses, keeps the band, closed bounds") {
  const std::vector<RadarPoint> pts{pt(0, 10, 3.5), pt(0, 10, 0.4), pt(0, 10, -1.5),
                                    pt(0, 10, 3.0), pt(0, 10, -1.6)};
  const auto out = height_filter(pts);
  REQUIRE(out.size() == 3);
  CHECK(out[0].z == doctest::Approx(0.4));
  CHECK(out[1].z == doctest::Approx(-1.5));  // exactly at z_min: kept
  CHECK(out[2].z == doctest::Approx(3.0));   // exactly at z_max: kept
}

TEST_CASE("expected_static_doppler geometry") {
  CHECK(expected_static_doppler(pt(0, 20, 0), 10.0) == doctest::Approx(-10.0));
  CHECK(expected_static_doppler(pt(20, 0, 0), 10.0) == doctest::Approx(0.0));
  CHECK(expected_static_doppler(pt(10, 10, 0), 10.0) == doctest::Approx(-7.0710678).epsilon(1e-6));
  CHECK_THROWS_AS(expected_static_doppler(pt(0, 0, 1), 10.0), std::domain_error);
}

TEST_CASE("doppler_filter keeps static, drops fast movers, closed threshold") {
  EgoState ego;
  ego.speed = 10.0;
  // static boundary point dead ahead: measured == expected == -10
  // oncoming car closing dead ahead at 15 m/s: measured -25, deviation 15
  // exact 1.0 m/s deviation: kept (closed threshold)
  const std::vector<RadarPoint> pts{pt(0, 20, 0, -10.0), pt(0, 30, 0, -25.0),
                                    pt(0, 40, 0, -11.0)};
  const auto out = doppler_filter(pts, ego);
  REQUIRE(out.size() == 2);
  CHECK(out[0].y == doctest::Approx(20.0));
  CHECK(out[1].y == doctest::Approx(40.0));
}

TEST_CASE("doppler_filter retains degenerate-bearing points") {
  EgoState ego;
  ego.speed = 10.0;
  const std::vector<RadarPoint> pts{pt(0, 0, 1.0, 99.0)};
  CHECK(doppler_filter(pts, ego).size() == 1);
}

TEST_CASE("filters are selections: subset, order preserved, values unmodified") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5), dz(-3, 5), dd(-20, 20);
  std::vector<RadarPoint> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(pt(u(rng) * 8, 5 + std::abs(u(rng)) * 10, dz(rng), dd(rng)));
  EgoState ego;
  ego.speed = 8.0;
  const auto h = height_filter(pts);
  const auto d = doppler_filter(h, ego);
  size_t cursor = 0;
  for (const auto& q : h) {
    while (cursor < pts.size() && (pts[cursor].x != q.x || pts[cursor].y != q.y ||
                                   pts[cursor].z != q.z || pts[cursor].doppler != q.doppler))
      ++cursor;
    REQUIRE(cursor < pts.size());  // found in order, bit-identical
    ++cursor;
  }
  CHECK(d.size() <= h.size());
}

TEST_CASE("noiseless synthetic frames: doppler filter is sound") {
  sim::Scenario sc = sim::build_scenario(sim::ScenarioKind::straight, 41);
  sc.ghost_rate = 0.0;
  sim::RadarModel radar;
  radar.pos_noise_lateral = radar.pos_noise_vertical = 0.0;
  radar.doppler_noise = 0.0;
  radar.snr_noise = 0.0;
  radar.dropout_prob = 0.0;
  auto rng = substream(1, Stream::sim, 3);
  const auto rf = sim::render_frame(sc, 0.3, radar, rng);
  const FilterConfig cfg;
  int boundary_total = 0, boundary_kept = 0;
  for (size_t i = 0; i < rf.frame.points.size(); ++i) {
    const auto& p = rf.frame.points[i];
    const bool kept = doppler_plausible(p, rf.frame.ego.speed, cfg);
    if (rf.sources[i] == sim::PointSource::boundary) {
      ++boundary_total;
      boundary_kept += kept;
    }
  }
  REQUIRE(boundary_total > 0);
  CHECK(boundary_kept == boundary_total);  // 100% of static boundary returns retained
}

TEST_CASE("fuse_frames: missing previous frames contribute nothing") {
  const RadarFrame curr = frame_at(1.0, 5.0, {pt(1, 2, 0.5), pt(-1, 3, 0.2)}, {1, 0});
  const FeatureCloud cloud = fuse_frames(curr);
  REQUIRE(cloud.size() == 2);
  for (const auto& p : cloud.pts) CHECK(p.frame_index == 0);
  CHECK(*cloud.pts[0].label == 1);
  CHECK(cloud.pts[0].ego_speed == doctest::Approx(5.0));
}

TEST_CASE("fuse_frames: stationary ego, identical frames differ only by frame_index") {
  const auto pts = std::vector<RadarPoint>{pt(1, 2, 0.5), pt(-1, 3, 0.2)};
  const RadarFrame f0 = frame_at(0.0, 0.0, pts), f1 = frame_at(0.1, 0.0, pts),
                   f2 = frame_at(0.2, 0.0, pts);
  const FeatureCloud cloud = fuse_frames(f2, &f1, &f0);
  REQUIRE(cloud.size() == 6);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 2; ++j) {
      const auto& row = cloud.pts[2 * k + j];
      CHECK(row.frame_index == k);
      CHECK(row.x == doctest::Approx(pts[j].x));
      CHECK(row.y == doctest::Approx(pts[j].y));
      CHECK(row.doppler == doctest::Approx(pts[j].doppler));
    }
}

TEST_CASE("fuse_frames: advancing ego aligns static reflectors across frames") {
  // Ego advances 1 m per frame; a static reflector at world (0, 10).
  RadarFrame f0 = frame_at(0.0, 10.0, {pt(0, 10, 0.5)});
  RadarFrame f1 = frame_at(0.1, 10.0, {pt(0, 9, 0.5)});
  f1.ego.pose = {0, 1, 0};
  RadarFrame f2 = frame_at(0.2, 10.0, {pt(0, 8, 0.5)});
  f2.ego.pose = {0, 2, 0};
  const FeatureCloud cloud = fuse_frames(f2, &f1, &f0);
  REQUIRE(cloud.size() == 3);
  for (const auto& row : cloud.pts) {
    CHECK(row.x == doctest::Approx(0.0));
    CHECK(row.y == doctest::Approx(8.0).epsilon(1e-12));
  }
}

TEST_CASE("fuse_frames rejects out-of-order timestamps") {
  const RadarFrame a = frame_at(0.0, 1.0, {pt(0, 5, 0)});
  const RadarFrame b = frame_at(0.1, 1.0, {pt(0, 5, 0)});
  CHECK_THROWS_AS(fuse_frames(a, &b), std::invalid_argument);
  const RadarFrame c = frame_at(0.2, 1.0, {pt(0, 5, 0)});
  CHECK_THROWS_AS(fuse_frames(c, &a, &b), std::invalid_argument);
}

TEST_CASE("fuse_frames output size is the sum of surviving inputs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10, 10);
  auto mk = [&](double t, int n) {
    std::vector<RadarPoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back(pt(u(rng), 5 + std::abs(u(rng)), 0.5));
    RadarFrame f = frame_at(t, 3.0, std::move(pts));
    return f;
  };
  const RadarFrame f0 = mk(0.0, 4), f1 = mk(0.1, 7), f2 = mk(0.2, 5);
  CHECK(fuse_frames(f2, &f1, &f0).size() == 16);
}

TEST_CASE("flip_augment maps points and is an involution") {
  RadarFrame f = frame_at(0.0, 8.0, {pt(3, 10, 0.5, -2.0)}, {1});
  f.ego.pose = {2.0, 5.0, 0.3};
  f.ego.yaw_rate = 0.1;
  const RadarFrame g = flip_augment(f);
  CHECK(g.points[0].x == doctest::Approx(-3.0));
  CHECK(g.points[0].y == doctest::Approx(10.0));
  CHECK(g.points[0].z == doctest::Approx(0.5));
  CHECK(g.points[0].doppler == doctest::Approx(-2.0));
  CHECK(g.ego.yaw_rate == doctest::Approx(-0.1));
  CHECK(g.ego.speed == doctest::Approx(8.0));
  CHECK((*g.labels)[0] == 1);

  const RadarFrame gg = flip_augment(g);
  CHECK(gg.points[0].x == doctest::Approx(3.0));
  CHECK(gg.ego.pose.x == doctest::Approx(f.ego.pose.x));
  CHECK(gg.ego.pose.yaw == doctest::Approx(f.ego.pose.yaw));
  CHECK(gg.ego.yaw_rate == doctest::Approx(0.1));
}

TEST_CASE("expected_static_doppler is invariant under flip") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 50; ++i) {
    const auto p = pt(u(rng), 1.0 + std::abs(u(rng)), 0.5);
    auto flipped = p;
    flipped.x = -flipped.x;
    CHECK(expected_static_doppler(p, 9.0) ==
          doctest::Approx(expected_static_doppler(flipped, 9.0)));
  }
}

TEST_CASE("fusing flipped frames equals flipping the fused cloud") {
  // Nonzero yaw and lateral motion make this a real consistency check.
  RadarFrame f0 = frame_at(0.0, 6.0, {pt(2, 8, 0.4), pt(-3, 12, 0.6)});
  f0.ego.pose = {1.0, 0.0, 0.2};
  RadarFrame f1 = frame_at(0.1, 6.0, {pt(1, 9, 0.4)});
  f1.ego.pose = {1.2, 0.6, 0.25};
  const FeatureCloud direct = fuse_frames(f1, &f0);
  const RadarFrame g0 = flip_augment(f0), g1 = flip_augment(f1);
  const FeatureCloud flipped = fuse_frames(g1, &g0);
  REQUIRE(direct.size() == flipped.size());
  for (size_t i = 0; i < direct.size(); ++i) {
    CHECK(flipped.pts[i].x == doctest::Approx(-direct.pts[i].x).epsilon(1e-10));
    CHECK(flipped.pts[i].y == doctest::Approx(direct.pts[i].y).epsilon(1e-10));
  }
}

TEST_CASE("flip_augment preserves label counts on rendered frames") {
  const auto sc = sim::build_scenario(sim::ScenarioKind::urban, 3);
  const auto frames = sim::render_sequence(sc, sim::RadarModel{}, 3, 3);
  for (const auto& f : frames) {
    const auto g = flip_augment(f);
    long sum_f = 0, sum_g = 0;
    for (int l : *f.labels) sum_f += l;
    for (int l : *g.labels) sum_g += l;
    CHECK(sum_f == sum_g);
  }
}
