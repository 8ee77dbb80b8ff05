#pragma once

#include "rbd/sim/scenario.hpp"

#include <random>
#include <vector>

namespace rbd::sim {

enum class PointSource { boundary, mover, overhead, ghost };

/// A rendered frame plus per-point provenance (which reflector produced it).
struct RenderedFrame {
  RadarFrame frame;
  std::vector<PointSource> sources;
  std::vector<int> source_boundary;  // boundary polyline index, -1 otherwise
};

/// Synthesize the radar frame at time t. Boundary scatterers live at fixed
/// arc-length stations so they persist across frames (modulo dropout).
/// Doppler follows the receding-positive convention; for static reflectors
/// it is -speed * y / sqrt(x^2 + y^2) of the true position, plus noise.
RenderedFrame render_frame(const Scenario& scenario, double t, const RadarModel& radar,
                           std::mt19937_64& rng);

/// Ground-truth labeling: 1 iff the point came from a boundary reflector AND
/// its measured position lies within tau (xy) of the source polyline.
std::vector<int> label_points(const RenderedFrame& rendered, const Scenario& scenario,
                              double tau = 0.5);

/// Render frames [0, n) with a per-frame RNG substream of `seed`.
std::vector<RadarFrame> render_sequence(const Scenario& scenario, const RadarModel& radar,
                                        int n_frames, std::uint64_t seed);

}  // namespace rbd::sim
