#pragma once

#include "rbd/seg/loss.hpp"
#include "rbd/seg/network.hpp"
#include "rbd/seg/temporal.hpp"

#include <cstdint>
#include <vector>

namespace rbd::seg {

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  int epochs = 20;
  int max_points = 2048;  // random subsample above
  std::uint64_t seed = 0;
  bool use_temporal = true;  // teacher-forced deviation features from GT
  bool augment_flip = true;  // each frame and its x-flip twin enter the epoch stream
};

struct EpochStats {
  double total = 0, bce = 0, dist = 0;  // epoch means
};

struct TrainResult {
  std::vector<EpochStats> trace;
};

/// Forward + loss + exact backward for one labeled cloud. Gradients are
/// accumulated into `grads` (zero it first for plain gradients).
LossParts loss_and_gradients(const SegModel& model, const prep::FeatureCloud& cloud,
                             const LossConfig& loss_cfg, SegModel& grads);

/// One training sample: a preprocessed, temporally-annotated cloud.
std::vector<prep::FeatureCloud> build_training_samples(const std::vector<RadarFrame>& frames,
                                                       const prep::FilterConfig& filter_cfg,
                                                       bool use_temporal, bool augment_flip);

/// Adam over frame-sized batches; deterministic for a fixed seed.
TrainResult train(const std::vector<RadarFrame>& frames, SegModel& model,
                  const TrainConfig& cfg, const LossConfig& loss_cfg = {},
                  const prep::FilterConfig& filter_cfg = {});

}  // namespace rbd::seg
