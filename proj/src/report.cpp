#include "rbd/eval/report.hpp"

#include "rbd/core/metrics.hpp"
#include "rbd/sim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rbd::eval {

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

// Oracle arm: ground-truth labels fed through as probabilities.
seg::Detection oracle_detection(const prep::FeatureCloud& cloud, const EgoPose& pose) {
  seg::Detection det;
  det.pose = pose;
  det.coords = cloud.coords();
  for (const auto& p : cloud.pts) {
    const int l = p.label.value_or(0);
    det.probs.push_back(l ? 1.0 : 0.0);
    det.pred.push_back(l);
  }
  return det;
}

}  // namespace

EvalReport evaluate_dataset(const seg::SegModel* model, const std::vector<RadarFrame>& frames,
                            const prep::FilterConfig& filter_cfg, const EvalOptions& opts,
                            std::vector<std::vector<seg::Detection>>* out_detections,
                            std::vector<std::vector<prep::FeatureCloud>>* out_clouds) {
  EvalReport report;
  report.arm = opts.arm;

  std::vector<double> chamfers, hausdorffs, accuracies;
  int seq_id = 0;
  for (const auto& seq : sim::split_sequences(frames)) {
    // Clouds are rebuilt here to pair each detection with its labels.
    std::vector<prep::FeatureCloud> clouds;
    clouds.reserve(seq.size());
    for (size_t i = 0; i < seq.size(); ++i)
      clouds.push_back(prep::preprocess_window(seq[i], i >= 1 ? &seq[i - 1] : nullptr,
                                               i >= 2 ? &seq[i - 2] : nullptr, filter_cfg));

    std::vector<seg::Detection> dets;
    if (opts.oracle) {
      for (size_t i = 0; i < seq.size(); ++i)
        dets.push_back(oracle_detection(clouds[i], seq[i].ego.pose));
    } else {
      if (!model) throw std::invalid_argument("evaluate_dataset: model required");
      dets = seg::run_sequence(*model, seq, filter_cfg, opts.temporal_ablation);
    }

    for (size_t i = 0; i < seq.size(); ++i) {
      const auto& cloud = clouds[i];
      const auto& det = dets[i];
      FrameEval fe;
      fe.seq = seq_id;
      fe.frame = static_cast<int>(i);
      fe.t = seq[i].timestamp;

      std::vector<Vec2> gt_xy, det_xy;
      for (size_t j = 0; j < cloud.size(); ++j) {
        const int label = cloud.pts[j].label.value_or(0);
        const int pred = j < det.pred.size() ? det.pred[j] : 0;
        fe.tp += label && pred;
        fe.fp += !label && pred;
        fe.tn += !label && !pred;
        fe.fn += label && !pred;
        if (label) gt_xy.push_back({cloud.pts[j].x, cloud.pts[j].y});
        if (pred) det_xy.push_back({cloud.pts[j].x, cloud.pts[j].y});
      }
      const long total = fe.tp + fe.fp + fe.tn + fe.fn;
      fe.accuracy = total > 0 ? static_cast<double>(fe.tp + fe.tn) / total : 1.0;
      if (!gt_xy.empty() && !det_xy.empty()) {
        fe.chamfer = chamfer(det_xy, gt_xy);
        fe.hausdorff = hausdorff(det_xy, gt_xy);
        chamfers.push_back(*fe.chamfer);
        hausdorffs.push_back(*fe.hausdorff);
        ++report.frames_with_metrics;
      } else {
        ++report.frames_with_empty_sets;
      }
      accuracies.push_back(fe.accuracy);
      report.tp += fe.tp;
      report.fp += fe.fp;
      report.tn += fe.tn;
      report.fn += fe.fn;
      report.frames.push_back(fe);
    }
    if (out_detections) out_detections->push_back(std::move(dets));
    if (out_clouds) out_clouds->push_back(std::move(clouds));
    ++seq_id;
  }

  const long total = report.tp + report.fp + report.tn + report.fn;
  report.accuracy = total > 0 ? static_cast<double>(report.tp + report.tn) / total : 1.0;
  if (!chamfers.empty()) {
    report.median_chamfer = median(chamfers);
    report.median_hausdorff = median(hausdorffs);
  }
  if (!accuracies.empty()) report.median_accuracy = median(accuracies);
  return report;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["arm"] = arm;
  j["confusion"] = {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}};
  j["accuracy"] = accuracy;
  j["frames_with_metrics"] = frames_with_metrics;
  j["frames_with_empty_sets"] = frames_with_empty_sets;
  j["median_chamfer"] = median_chamfer ? nlohmann::ordered_json(*median_chamfer) : nlohmann::ordered_json(nullptr);
  j["median_hausdorff"] = median_hausdorff ? nlohmann::ordered_json(*median_hausdorff) : nlohmann::ordered_json(nullptr);
  j["median_accuracy"] = median_accuracy ? nlohmann::ordered_json(*median_accuracy) : nlohmann::ordered_json(nullptr);
  auto& fr = j["frames"] = nlohmann::ordered_json::array();
  for (const FrameEval& f : frames) {
    nlohmann::ordered_json row;
    row["seq"] = f.seq;
    row["frame"] = f.frame;
    row["t"] = f.t;
    row["tp"] = f.tp;
    row["fp"] = f.fp;
    row["tn"] = f.tn;
    row["fn"] = f.fn;
    row["accuracy"] = f.accuracy;
    row["chamfer"] = f.chamfer ? nlohmann::ordered_json(*f.chamfer) : nlohmann::ordered_json(nullptr);
    row["hausdorff"] = f.hausdorff ? nlohmann::ordered_json(*f.hausdorff) : nlohmann::ordered_json(nullptr);
    fr.push_back(std::move(row));
  }
  return j;
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "seq,frame,t,tp,fp,tn,fn,accuracy,chamfer,hausdorff\n";
  for (const FrameEval& f : frames) {
    out << f.seq << ',' << f.frame << ',' << f.t << ',' << f.tp << ',' << f.fp << ',' << f.tn
        << ',' << f.fn << ',' << f.accuracy << ',';
    if (f.chamfer) out << *f.chamfer;
    out << ',';
    if (f.hausdorff) out << *f.hausdorff;
    out << '\n';
  }
  return out.str();
}

}  // namespace rbd::eval
