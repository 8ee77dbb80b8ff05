#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rbd/core/geometry.hpp"
#include "rbd/core/metrics.hpp"
#include "support.hpp"

#include <random>

using namespace rbd;

namespace {

EgoPose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-50.0, 50.0), a(-M_PI, M_PI);
  return {u(rng), u(rng), a(rng)};
}

// Independent O(|A||B|) reference for the set metrics.
double brute_chamfer(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double s_ab = 0, s_ba = 0;
  for (const auto& p : a) {
    double m = 1e300;
    for (const auto& q : b) m = std::min(m, (p - q).norm());
    s_ab += m;
  }
  for (const auto& q : b) {
    double m = 1e300;
    for (const auto& p : a) m = std::min(m, (q - p).norm());
    s_ba += m;
  }
  return 0.5 * (s_ab / a.size() + s_ba / b.size());
}

double brute_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double h_ab = 0, h_ba = 0;
  for (const auto& p : a) {
    double m = 1e300;
    for (const auto& q : b) m = std::min(m, (p - q).norm());
    h_ab = std::max(h_ab, m);
  }
  for (const auto& q : b) {
    double m = 1e300;
    for (const auto& p : a) m = std::min(m, (q - p).norm());
    h_ba = std::max(h_ba, m);
  }
  return std::max(h_ab, h_ba);
}

}  // namespace

TEST_CASE("ego_to_world identity pose") {
  const Vec3 w = ego_to_world({1, 2, 0.5}, {0, 0, 0});
  CHECK(w.x() == doctest::Approx(1.0));
  CHECK(w.y() == doctest::Approx(2.0));
  CHECK(w.z() == doctest::Approx(0.5));
}

TEST_CASE("ego_to_world quarter-turn convention") {
  // Vehicle right (+x) maps to world +y after a CCW quarter turn.
  const Vec3 w = ego_to_world({1, 0, 0}, {0, 0, M_PI / 2});
  CHECK(w.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w.y() == doctest::Approx(1.0));
  CHECK(w.z() == doctest::Approx(0.0));
}

TEST_CASE("world/ego round trip on random poses") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const EgoPose pose = random_pose(rng);
    const Vec3 back = world_to_ego(ego_to_world(p, pose), pose);
    CHECK((back - p).norm() < 1e-9);
  }
}

TEST_CASE("motion_compensate no motion is identity") {
  const EgoPose pose{3, -2, 0.7};
  const Vec3 p(1, 2, 3);
  CHECK((motion_compensate(p, pose, pose) - p).norm() < 1e-12);
}

TEST_CASE("motion_compensate pure forward motion") {
  const Vec3 p = motion_compensate({0, 10, 0}, {0, 0, 0}, {0, 2, 0});
  CHECK(p.x() == doctest::Approx(0.0));
  CHECK(p.y() == doctest::Approx(8.0));
}

TEST_CASE("motion_compensate pure yaw change matches rotation oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  const EgoPose prev{0, 0, 0}, curr{0, 0, M_PI / 2};
  // Independent 2x2 oracle: new = R(-delta_yaw) * old in the xy plane.
  const double c = std::cos(-M_PI / 2), s = std::sin(-M_PI / 2);
  for (int i = 0; i < 50; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const Vec3 got = motion_compensate(p, prev, curr);
    CHECK(got.x() == doctest::Approx(c * p.x() - s * p.y()).epsilon(1e-10));
    CHECK(got.y() == doctest::Approx(s * p.x() + c * p.y()).epsilon(1e-10));
    CHECK(got.z() == doctest::Approx(p.z()));
  }
}

TEST_CASE("motion_compensate with swapped poses inverts itself") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    const EgoPose a = random_pose(rng), b = random_pose(rng);
    const Vec3 p(u(rng), u(rng), u(rng));
    const Vec3 back = motion_compensate(motion_compensate(p, a, b), b, a);
    CHECK((back - p).norm() < 1e-9);
  }
}

TEST_CASE("nearest_neighbor examples") {
  const std::vector<Vec2> ref1{{0, 0}, {5, 5}};
  auto r = nearest_neighbor(Vec2{0, 0}, ref1);
  CHECK(r.index == 0);
  CHECK(r.distance == doctest::Approx(0.0));
  CHECK(r.offset.norm() == doctest::Approx(0.0));

  const std::vector<Vec2> ref2{{0, 0}, {3, 0}};
  r = nearest_neighbor(Vec2{1, 0}, ref2);
  CHECK(r.index == 0);
  CHECK(r.distance == doctest::Approx(1.0));
  CHECK(r.offset.x() == doctest::Approx(1.0));
  CHECK(r.offset.y() == doctest::Approx(0.0));

  // Equidistant: documented tie-break to the lowest index.
  r = nearest_neighbor(Vec2{1.5, 0}, ref2);
  CHECK(r.index == 0);
}

TEST_CASE("nearest_neighbor empty reference throws") {
  CHECK_THROWS_WITH_AS(nearest_neighbor(Vec2{0, 0}, std::vector<Vec2>{}),
                       "empty reference set", std::invalid_argument);
}

TEST_CASE("nearest_neighbor equals exhaustive scan on random instances") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> size(1, 500);
  for (int rep = 0; rep < 25; ++rep) {
    const auto ref = test::random_points2(rng, size(rng));
    const auto queries = test::random_points2(rng, 20);
    for (const auto& q : queries) {
      const auto got = nearest_neighbor(q, ref);
      int best = 0;
      double bd = (q - ref[0]).norm();
      for (int i = 1; i < static_cast<int>(ref.size()); ++i) {
        const double d = (q - ref[i]).norm();
        if (d < bd) {
          bd = d;
          best = i;
        }
      }
      CHECK(got.index == best);
      CHECK(got.distance == doctest::Approx(bd));
    }
  }
}

TEST_CASE("chamfer examples") {
  const std::vector<Vec2> a{{0, 0}, {1, 1}};
  CHECK(chamfer(a, a) == doctest::Approx(0.0));
  CHECK(chamfer(std::vector<Vec2>{{0, 0}}, std::vector<Vec2>{{3, 4}}) == doctest::Approx(5.0));
  CHECK_THROWS_WITH_AS(chamfer(std::vector<Vec2>{}, a), "undefined metric",
                       std::invalid_argument);
}

TEST_CASE("hausdorff examples") {
  const std::vector<Vec2> a{{0, 0}, {10, 0}}, b{{0, 0}};
  CHECK(hausdorff(a, a) == doctest::Approx(0.0));
  CHECK(hausdorff(a, b) == doctest::Approx(10.0));
  CHECK_THROWS_WITH_AS(hausdorff(b, std::vector<Vec2>{}), "undefined metric",
                       std::invalid_argument);
}

TEST_CASE("set metrics match the exhaustive pairwise oracle") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    const auto a = test::random_points2(rng, 7);
    const auto b = test::random_points2(rng, 9);
    CHECK(std::abs(chamfer(a, b) - brute_chamfer(a, b)) < 1e-9);
    CHECK(std::abs(hausdorff(a, b) - brute_hausdorff(a, b)) < 1e-9);
  }
}

TEST_CASE("set metric properties: symmetry, positivity, ordering") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = test::random_points2(rng, 6);
    const auto b = test::random_points2(rng, 8);
    const double cd = chamfer(a, b), hd = hausdorff(a, b);
    CHECK(cd == doctest::Approx(chamfer(b, a)));
    CHECK(hd == doctest::Approx(hausdorff(b, a)));
    CHECK(cd >= 0.0);
    CHECK(hd >= cd - 1e-12);
    CHECK(chamfer(a, a) == doctest::Approx(0.0));
  }
}
