#pragma once

#include "rbd/core/types.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace rbd::test {

/// Unique temp directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path = std::filesystem::temp_directory_path() /
           ("rbd_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline std::vector<Vec2> random_points2(std::mt19937_64& rng, int n, double lo = -20.0,
                                        double hi = 20.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
  return pts;
}

inline std::vector<Vec3> random_points3(std::mt19937_64& rng, int n, double lo = -20.0,
                                        double hi = 20.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng), u(rng)});
  return pts;
}

}  // namespace rbd::test
