#pragma once

#include "rbd/prep/features.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rbd::seg {

/// One set-abstraction level: sample n_centroids by farthest-point sampling,
/// group <= k neighbors within radius, run a shared MLP, max-pool per group.
struct SaSpec {
  int n_centroids = 512;
  double radius = 2.0;  // m
  int k = 16;
  std::array<int, 3> widths{32, 32, 64};
};

struct FpSpec {
  std::array<int, 2> widths{64, 64};
};

struct SegNetConfig {
  SaSpec sa1{512, 2.0, 16, {32, 32, 64}};
  SaSpec sa2{128, 4.0, 16, {64, 64, 128}};
  FpSpec fp1{{128, 64}};
  FpSpec fp2{{64, 64}};
  int head_hidden = 32;

  /// Tiny configuration for gradient checks: 8/4 centroids, narrow MLPs.
  static SegNetConfig micro() {
    SegNetConfig c;
    c.sa1 = {8, 2.0, 4, {8, 8, 16}};
    c.sa2 = {4, 4.0, 4, {16, 16, 32}};
    c.fp1 = {{32, 16}};
    c.fp2 = {{16, 16}};
    c.head_hidden = 8;
    return c;
  }
};

struct Dense {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;  // out
};

struct Mlp {
  std::vector<Dense> layers;
};

/// Flat view of one parameter tensor (used by Adam, checkpoints and the
/// finite-difference harness).
struct ParamRef {
  std::string name;
  double* data;
  Eigen::Index rows, cols;
  Eigen::Index size() const { return rows * cols; }
};

struct SegModel {
  SegNetConfig cfg;
  Mlp sa1_mlp, sa2_mlp, fp1_mlp, fp2_mlp, head_mlp;

  /// He-uniform init, deterministic for a fixed seed.
  static SegModel init(const SegNetConfig& cfg, std::uint64_t seed);
  /// Same shapes as `like`, all parameters zero (gradient/optimizer buffers).
  static SegModel zeros_like(const SegModel& like);

  std::vector<ParamRef> params();
};

/// Per-feature input scaling so raw physical units land near [-1, 1].
/// Fixed (not learned); part of the model definition.
extern const std::array<double, 12> kFeatureScale;

/// ---- forward/backward machinery -----------------------------------------

struct MlpTrace {
  std::vector<Eigen::MatrixXd> acts;  // acts[0]=input, acts[l+1]=post-activation of layer l
  std::vector<Eigen::MatrixXd> pre;   // pre-activation of layer l
};

struct SaTrace {
  std::vector<int> centroids;             // indices into this level's point list
  std::vector<std::vector<int>> groups;   // neighbor indices per centroid
  std::vector<int> col_offset;            // first column of each group
  MlpTrace mlp;
  Eigen::MatrixXd pooled;                 // out_width x m
  Eigen::MatrixXi argmax;                 // winning global column per (channel, group)
};

struct InterpTrace {
  // Up to 3 source centroids per query with normalized inverse-d^2 weights.
  std::vector<std::array<int, 3>> idx;
  std::vector<std::array<double, 3>> w;
  std::vector<int> count;
};

struct FpTrace {
  InterpTrace interp;
  MlpTrace mlp;
};

struct ForwardTrace {
  Eigen::MatrixXd feats_scaled;  // 12 x n
  std::vector<Vec3> coords;      // n
  std::vector<Vec3> sa1_coords, sa2_coords;
  SaTrace sa1, sa2;
  FpTrace fp1, fp2;
  MlpTrace head;
  Eigen::VectorXd logits, probs;
};

/// Greedy max-min farthest point sampling starting from index 0;
/// ties break to the lowest index. Requires 1 <= m <= n.
std::vector<int> farthest_point_sample(const std::vector<Vec3>& pts, int m);

/// First k points (lowest index order) within radius of the centroid; if the
/// ball is empty, falls back to the single nearest point.
std::vector<int> ball_query(const Vec3& centroid, const std::vector<Vec3>& pts, double radius,
                            int k);

/// Point-wise boundary probabilities in (0,1). Errors on an empty cloud.
Eigen::VectorXd seg_forward(const SegModel& model, const prep::FeatureCloud& cloud,
                            ForwardTrace* trace = nullptr);

/// Exact reverse-mode gradients of the forward pass. dprobs is dLoss/dprob
/// per point; gradients are accumulated into `grads` (same shapes as model).
void seg_backward(const SegModel& model, const ForwardTrace& trace,
                  const Eigen::VectorXd& dprobs, SegModel& grads);

}  // namespace rbd::seg
