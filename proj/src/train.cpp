#include "rbd/seg/train.hpp"

#include "rbd/sim/dataset.hpp"
#include "rbd/util/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace rbd::seg {

LossParts loss_and_gradients(const SegModel& model, const prep::FeatureCloud& cloud,
                             const LossConfig& loss_cfg, SegModel& grads) {
  if (!cloud.fully_labeled()) throw std::invalid_argument("training requires labeled clouds");
  ForwardTrace trace;
  const Eigen::VectorXd probs = seg_forward(model, cloud, &trace);

  std::vector<int> labels;
  std::vector<Vec2> coords_xy;
  labels.reserve(cloud.size());
  coords_xy.reserve(cloud.size());
  for (const auto& p : cloud.pts) {
    labels.push_back(*p.label);
    coords_xy.push_back({p.x, p.y});
  }
  const std::vector<Vec2> gt_xy = cloud.gt_boundary_xy();

  const LossParts parts = total_loss(probs, labels, coords_xy, gt_xy, loss_cfg);
  const Eigen::VectorXd dprobs = loss_gradient(probs, labels, coords_xy, gt_xy, loss_cfg);
  seg_backward(model, trace, dprobs, grads);
  return parts;
}

namespace {

// Teacher-forcing detection: the previous frame's ground-truth boundary
// points stand in for the previous detection, with probability 1.
Detection gt_detection(const RadarFrame& f) {
  Detection det;
  det.pose = f.ego.pose;
  if (!f.labels) return det;
  det.coords.reserve(f.points.size());
  for (size_t i = 0; i < f.points.size(); ++i) {
    det.coords.push_back(f.points[i].position());
    det.probs.push_back(1.0);
    det.pred.push_back((*f.labels)[i]);
  }
  return det;
}

void add_sequence_samples(std::vector<prep::FeatureCloud>& out,
                          const std::vector<RadarFrame>& seq,
                          const prep::FilterConfig& filter_cfg, bool use_temporal) {
  for (size_t i = 0; i < seq.size(); ++i) {
    prep::FeatureCloud cloud = prep::preprocess_window(
        seq[i], i >= 1 ? &seq[i - 1] : nullptr, i >= 2 ? &seq[i - 2] : nullptr, filter_cfg);
    if (cloud.empty()) continue;
    if (use_temporal && i >= 1) {
      const Detection det = gt_detection(seq[i - 1]);
      attach_temporal(cloud, deviation_features(cloud.coords(), &det, seq[i - 1].ego.pose,
                                                seq[i].ego.pose));
    }
    out.push_back(std::move(cloud));
  }
}

prep::FeatureCloud subsampled(const prep::FeatureCloud& cloud, int max_points,
                              std::mt19937_64& rng) {
  if (static_cast<int>(cloud.size()) <= max_points) return cloud;
  std::vector<int> keep = sample_indices(static_cast<int>(cloud.size()), max_points, rng);
  std::sort(keep.begin(), keep.end());
  prep::FeatureCloud out;
  out.pts.reserve(keep.size());
  for (int i : keep) out.pts.push_back(cloud.pts[i]);
  return out;
}

struct Adam {
  SegModel m, v;
  long t = 0;

  explicit Adam(const SegModel& like) : m(SegModel::zeros_like(like)), v(SegModel::zeros_like(like)) {}

  void step(SegModel& model, SegModel& grads, const TrainConfig& cfg) {
    ++t;
    auto p = model.params();
    auto g = grads.params();
    auto pm = m.params();
    auto pv = v.params();
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (size_t k = 0; k < p.size(); ++k) {
      for (Eigen::Index i = 0; i < p[k].size(); ++i) {
        const double gi = g[k].data[i];
        pm[k].data[i] = cfg.beta1 * pm[k].data[i] + (1.0 - cfg.beta1) * gi;
        pv[k].data[i] = cfg.beta2 * pv[k].data[i] + (1.0 - cfg.beta2) * gi * gi;
        const double mhat = pm[k].data[i] / bc1;
        const double vhat = pv[k].data[i] / bc2;
        p[k].data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
      }
    }
  }
};

}  // namespace

std::vector<prep::FeatureCloud> build_training_samples(const std::vector<RadarFrame>& frames,
                                                       const prep::FilterConfig& filter_cfg,
                                                       bool use_temporal, bool augment_flip) {
  std::vector<prep::FeatureCloud> samples;
  for (const auto& seq : sim::split_sequences(frames)) {
    add_sequence_samples(samples, seq, filter_cfg, use_temporal);
    if (augment_flip) {
      std::vector<RadarFrame> flipped;
      flipped.reserve(seq.size());
      for (const auto& f : seq) flipped.push_back(prep::flip_augment(f));
      add_sequence_samples(samples, flipped, filter_cfg, use_temporal);
    }
  }
  return samples;
}

TrainResult train(const std::vector<RadarFrame>& frames, SegModel& model, const TrainConfig& cfg,
                  const LossConfig& loss_cfg, const prep::FilterConfig& filter_cfg) {
  if (frames.empty()) throw std::invalid_argument("train: empty dataset");
  const std::vector<prep::FeatureCloud> samples =
      build_training_samples(frames, filter_cfg, cfg.use_temporal, cfg.augment_flip);
  if (samples.empty()) throw std::invalid_argument("train: no usable samples");

  Adam adam(model);
  TrainResult result;
  auto sub_rng = substream(cfg.seed, Stream::train_subsample);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto shuffle_rng = substream(cfg.seed, Stream::train_shuffle, epoch);
    const std::vector<int> order =
        sample_indices(static_cast<int>(samples.size()), static_cast<int>(samples.size()),
                       shuffle_rng);
    EpochStats stats;
    for (int si : order) {
      const prep::FeatureCloud cloud = subsampled(samples[si], cfg.max_points, sub_rng);
      SegModel grads = SegModel::zeros_like(model);
      const LossParts parts = loss_and_gradients(model, cloud, loss_cfg, grads);
      adam.step(model, grads, cfg);
      stats.total += parts.total;
      stats.bce += parts.bce;
      stats.dist += parts.dist;
    }
    const double inv = 1.0 / static_cast<double>(order.size());
    stats.total *= inv;
    stats.bce *= inv;
    stats.dist *= inv;
    result.trace.push_back(stats);
  }
  return result;
}

}  // namespace rbd::seg
