#pragma once

#include "rbd/seg/temporal.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace rbd::eval {

struct FrameEval {
  int seq = 0;
  int frame = 0;
  double t = 0.0;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  std::optional<double> chamfer;    // set only when GT and detection are both non-empty
  std::optional<double> hausdorff;
};

/// Per-frame and aggregate segmentation metrics for one evaluation run.
/// Medians of the set metrics are taken over frames where both the GT and
/// the detected boundary sets are non-empty; the remaining frames are
/// counted separately.
struct EvalReport {
  std::string arm = "full";  // full | no_temporal | no_distance_loss | oracle
  std::vector<FrameEval> frames;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;  // (TP+TN)/total over all points
  int frames_with_metrics = 0;
  int frames_with_empty_sets = 0;
  std::optional<double> median_chamfer, median_hausdorff, median_accuracy;

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

struct EvalOptions {
  bool temporal_ablation = false;
  bool oracle = false;  // feed ground-truth labels as probabilities
  std::string arm = "full";
};

/// Run sequential inference over every sequence in `frames` and score it.
/// Detections are returned through `out_detections` (per sequence) when
/// non-null, for plotting and curve export.
EvalReport evaluate_dataset(const seg::SegModel* model, const std::vector<RadarFrame>& frames,
                            const prep::FilterConfig& filter_cfg, const EvalOptions& opts,
                            std::vector<std::vector<seg::Detection>>* out_detections = nullptr,
                            std::vector<std::vector<prep::FeatureCloud>>* out_clouds = nullptr);

double median(std::vector<double> values);  // empty -> NaN

}  // namespace rbd::eval
