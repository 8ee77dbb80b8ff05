#include "rbd/seg/network.hpp"

#include "rbd/util/rng.hpp"

#include <limits>
#include <stdexcept>

namespace rbd::seg {

const std::array<double, 12> kFeatureScale = {
    1.0 / 80, 1.0 / 80, 1.0 / 3,  // x, y, z
    1.0 / 15, 1.0 / 40, 1.0 / 80, // doppler, snr, range
    1.0 / 30, 2.0,      0.5,      // ego_speed, yaw_rate, frame_index
    0.1,      0.1,      1.0,      // dev_x, dev_y, prev_prob
};

namespace {

Mlp make_mlp(const std::vector<int>& widths, std::mt19937_64& rng) {
  Mlp mlp;
  for (size_t l = 1; l < widths.size(); ++l) {
    Dense d;
    const int in = widths[l - 1], out = widths[l];
    const double bound = std::sqrt(6.0 / in);
    std::uniform_real_distribution<double> u(-bound, bound);
    d.W = Eigen::MatrixXd::NullaryExpr(out, in, [&]() { return u(rng); });
    d.b = Eigen::VectorXd::Zero(out);
    mlp.layers.push_back(std::move(d));
  }
  return mlp;
}

void collect(std::vector<ParamRef>& out, const std::string& prefix, Mlp& mlp) {
  for (size_t l = 0; l < mlp.layers.size(); ++l) {
    Dense& d = mlp.layers[l];
    out.push_back({prefix + "." + std::to_string(l) + ".W", d.W.data(), d.W.rows(), d.W.cols()});
    out.push_back({prefix + "." + std::to_string(l) + ".b", d.b.data(), d.b.rows(), 1});
  }
}

// Forward an MLP over a column batch. All layers ReLU unless linear_last.
Eigen::MatrixXd mlp_forward(const Mlp& mlp, const Eigen::MatrixXd& input, MlpTrace* trace,
                            bool linear_last) {
  Eigen::MatrixXd a = input;
  if (trace) {
    trace->acts.clear();
    trace->pre.clear();
    trace->acts.push_back(a);
  }
  for (size_t l = 0; l < mlp.layers.size(); ++l) {
    Eigen::MatrixXd z = (mlp.layers[l].W * a).colwise() + mlp.layers[l].b;
    const bool relu = !(linear_last && l + 1 == mlp.layers.size());
    if (trace) trace->pre.push_back(z);
    a = relu ? z.cwiseMax(0.0) : z;
    if (trace) trace->acts.push_back(a);
  }
  return a;
}

// Backward through an MLP given dLoss/dOutput; accumulates parameter
// gradients and returns dLoss/dInput.
Eigen::MatrixXd mlp_backward(const Mlp& mlp, const MlpTrace& trace, Eigen::MatrixXd dout,
                             Mlp& grads, bool linear_last) {
  for (int l = static_cast<int>(mlp.layers.size()) - 1; l >= 0; --l) {
    const bool relu = !(linear_last && l + 1 == static_cast<int>(mlp.layers.size()));
    if (relu) dout = (trace.pre[l].array() > 0.0).select(dout, 0.0);
    grads.layers[l].W.noalias() += dout * trace.acts[l].transpose();
    grads.layers[l].b.noalias() += dout.rowwise().sum();
    if (l > 0)
      dout = (mlp.layers[l].W.transpose() * dout).eval();
    else
      return mlp.layers[l].W.transpose() * dout;
  }
  return dout;  // unreachable for non-empty mlp
}

// Inverse-distance-squared interpolation stencil over the 3 nearest sources;
// an exact positional hit uses that source alone (lowest index on ties).
InterpTrace build_interp(const std::vector<Vec3>& queries, const std::vector<Vec3>& sources) {
  InterpTrace t;
  const int ns = static_cast<int>(sources.size());
  const int use = std::min(3, ns);
  t.idx.resize(queries.size());
  t.w.resize(queries.size());
  t.count.assign(queries.size(), 0);
  for (size_t q = 0; q < queries.size(); ++q) {
    std::array<int, 3> best_i{-1, -1, -1};
    std::array<double, 3> best_d{};
    best_d.fill(std::numeric_limits<double>::infinity());
    for (int s = 0; s < ns; ++s) {
      const double d2 = (queries[q] - sources[s]).squaredNorm();
      for (int slot = 0; slot < use; ++slot) {
        if (d2 < best_d[slot]) {
          for (int m = use - 1; m > slot; --m) {
            best_d[m] = best_d[m - 1];
            best_i[m] = best_i[m - 1];
          }
          best_d[slot] = d2;
          best_i[slot] = s;
          break;
        }
      }
    }
    if (best_d[0] <= 1e-24) {  // exact hit
      t.idx[q] = {best_i[0], -1, -1};
      t.w[q] = {1.0, 0.0, 0.0};
      t.count[q] = 1;
      continue;
    }
    double wsum = 0.0;
    for (int slot = 0; slot < use; ++slot) wsum += 1.0 / best_d[slot];
    for (int slot = 0; slot < use; ++slot) {
      t.idx[q][slot] = best_i[slot];
      t.w[q][slot] = (1.0 / best_d[slot]) / wsum;
    }
    t.count[q] = use;
  }
  return t;
}

Eigen::MatrixXd apply_interp(const InterpTrace& t, const Eigen::MatrixXd& source_feats) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(source_feats.rows(), t.idx.size());
  for (size_t q = 0; q < t.idx.size(); ++q)
    for (int s = 0; s < t.count[q]; ++s)
      out.col(q).noalias() += t.w[q][s] * source_feats.col(t.idx[q][s]);
  return out;
}

void backprop_interp(const InterpTrace& t, const Eigen::MatrixXd& dinterp,
                     Eigen::MatrixXd& dsource) {
  for (size_t q = 0; q < t.idx.size(); ++q)
    for (int s = 0; s < t.count[q]; ++s)
      dsource.col(t.idx[q][s]).noalias() += t.w[q][s] * dinterp.col(q);
}

// One set-abstraction level over (coords, feats). feats' first dimension is
// concatenated below the centroid-relative coordinates.
void sa_forward(const Mlp& mlp, const SaSpec& spec, const std::vector<Vec3>& coords,
                const Eigen::MatrixXd& feats, SaTrace& trace, std::vector<Vec3>& out_coords) {
  const int n = static_cast<int>(coords.size());
  const int m = std::min(spec.n_centroids, n);
  trace.centroids = farthest_point_sample(coords, m);
  trace.groups.resize(m);
  trace.col_offset.resize(m);
  int total = 0;
  for (int g = 0; g < m; ++g) {
    trace.groups[g] = ball_query(coords[trace.centroids[g]], coords, spec.radius, spec.k);
    trace.col_offset[g] = total;
    total += static_cast<int>(trace.groups[g].size());
  }

  const int in_dim = 3 + static_cast<int>(feats.rows());
  Eigen::MatrixXd cols(in_dim, total);
  for (int g = 0; g < m; ++g) {
    const Vec3& c = coords[trace.centroids[g]];
    for (size_t j = 0; j < trace.groups[g].size(); ++j) {
      const int p = trace.groups[g][j];
      const int col = trace.col_offset[g] + static_cast<int>(j);
      cols.block<3, 1>(0, col) = coords[p] - c;
      cols.block(3, col, feats.rows(), 1) = feats.col(p);
    }
  }

  const Eigen::MatrixXd activ = mlp_forward(mlp, cols, &trace.mlp, /*linear_last=*/false);
  const int out_w = static_cast<int>(activ.rows());
  trace.pooled.resize(out_w, m);
  trace.argmax.resize(out_w, m);
  for (int g = 0; g < m; ++g) {
    const int off = trace.col_offset[g];
    const int cnt = static_cast<int>(trace.groups[g].size());
    for (int ch = 0; ch < out_w; ++ch) {
      int best = off;
      double bv = activ(ch, off);
      for (int j = 1; j < cnt; ++j)
        if (activ(ch, off + j) > bv) {  // strict > keeps the lowest index on ties
          bv = activ(ch, off + j);
          best = off + j;
        }
      trace.pooled(ch, g) = bv;
      trace.argmax(ch, g) = best;
    }
  }

  out_coords.resize(m);
  for (int g = 0; g < m; ++g) out_coords[g] = coords[trace.centroids[g]];
}

// Backward through one SA level. dpooled is dLoss/dpooled. Returns
// dLoss/dfeats for this level's input features (rel-coord rows dropped).
Eigen::MatrixXd sa_backward(const Mlp& mlp, const SaTrace& trace, const Eigen::MatrixXd& dpooled,
                            Mlp& grads, int feat_rows, int n_points) {
  const int total = static_cast<int>(trace.mlp.acts[0].cols());
  Eigen::MatrixXd dact = Eigen::MatrixXd::Zero(dpooled.rows(), total);
  for (int g = 0; g < static_cast<int>(trace.groups.size()); ++g)
    for (int ch = 0; ch < dpooled.rows(); ++ch)
      dact(ch, trace.argmax(ch, g)) += dpooled(ch, g);

  const Eigen::MatrixXd dcols = mlp_backward(mlp, trace.mlp, dact, grads, false);
  Eigen::MatrixXd dfeats = Eigen::MatrixXd::Zero(feat_rows, n_points);
  for (int g = 0; g < static_cast<int>(trace.groups.size()); ++g)
    for (size_t j = 0; j < trace.groups[g].size(); ++j) {
      const int col = trace.col_offset[g] + static_cast<int>(j);
      dfeats.col(trace.groups[g][j]).noalias() += dcols.block(3, col, feat_rows, 1);
    }
  return dfeats;
}

}  // namespace

std::vector<int> farthest_point_sample(const std::vector<Vec3>& pts, int m) {
  const int n = static_cast<int>(pts.size());
  if (n < 1) throw std::invalid_argument("farthest_point_sample: empty input");
  if (m > n) throw std::invalid_argument("farthest_point_sample: m > n");
  std::vector<int> sel;
  sel.reserve(m);
  sel.push_back(0);
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = (pts[i] - pts[0]).squaredNorm();
  while (static_cast<int>(sel.size()) < m) {
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (d2[i] > d2[best]) best = i;
    sel.push_back(best);
    for (int i = 0; i < n; ++i) d2[i] = std::min(d2[i], (pts[i] - pts[best]).squaredNorm());
  }
  return sel;
}

std::vector<int> ball_query(const Vec3& centroid, const std::vector<Vec3>& pts, double radius,
                            int k) {
  if (radius <= 0.0 || k < 1) throw std::invalid_argument("ball_query: bad radius/k");
  std::vector<int> out;
  const double r2 = radius * radius;
  for (int i = 0; i < static_cast<int>(pts.size()) && static_cast<int>(out.size()) < k; ++i)
    if ((pts[i] - centroid).squaredNorm() <= r2) out.push_back(i);
  if (out.empty()) {
    int best = 0;
    double bd = (pts[0] - centroid).squaredNorm();
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
      const double d = (pts[i] - centroid).squaredNorm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    out.push_back(best);
  }
  return out;
}

SegModel SegModel::init(const SegNetConfig& cfg, std::uint64_t seed) {
  SegModel m;
  m.cfg = cfg;
  auto rng = substream(seed, Stream::train_init);
  m.sa1_mlp = make_mlp({12, cfg.sa1.widths[0], cfg.sa1.widths[1], cfg.sa1.widths[2]}, rng);
  m.sa2_mlp = make_mlp({cfg.sa1.widths[2] + 3, cfg.sa2.widths[0], cfg.sa2.widths[1],
                        cfg.sa2.widths[2]}, rng);
  m.fp1_mlp = make_mlp({cfg.sa2.widths[2] + cfg.sa1.widths[2], cfg.fp1.widths[0],
                        cfg.fp1.widths[1]}, rng);
  m.fp2_mlp = make_mlp({cfg.fp1.widths[1] + 12, cfg.fp2.widths[0], cfg.fp2.widths[1]}, rng);
  m.head_mlp = make_mlp({cfg.fp2.widths[1], cfg.head_hidden, 1}, rng);
  return m;
}

SegModel SegModel::zeros_like(const SegModel& like) {
  SegModel z = like;
  for (Mlp* mlp : {&z.sa1_mlp, &z.sa2_mlp, &z.fp1_mlp, &z.fp2_mlp, &z.head_mlp})
    for (Dense& d : mlp->layers) {
      d.W.setZero();
      d.b.setZero();
    }
  return z;
}

std::vector<ParamRef> SegModel::params() {
  std::vector<ParamRef> out;
  collect(out, "sa1", sa1_mlp);
  collect(out, "sa2", sa2_mlp);
  collect(out, "fp1", fp1_mlp);
  collect(out, "fp2", fp2_mlp);
  collect(out, "head", head_mlp);
  return out;
}

Eigen::VectorXd seg_forward(const SegModel& model, const prep::FeatureCloud& cloud,
                            ForwardTrace* trace) {
  if (cloud.empty()) throw std::invalid_argument("seg_forward: empty cloud");
  ForwardTrace local;
  ForwardTrace& t = trace ? *trace : local;

  const int n = static_cast<int>(cloud.size());
  t.coords = cloud.coords();
  t.feats_scaled = cloud.feature_matrix();
  for (int r = 0; r < 12; ++r) t.feats_scaled.row(r) *= kFeatureScale[r];

  // SA1 consumes the 9 non-position feature rows below the relative coords.
  sa_forward(model.sa1_mlp, model.cfg.sa1, t.coords, t.feats_scaled.bottomRows(9), t.sa1,
             t.sa1_coords);
  sa_forward(model.sa2_mlp, model.cfg.sa2, t.sa1_coords, t.sa1.pooled, t.sa2, t.sa2_coords);

  // FP1: SA2 features -> SA1 centroids, skip-concat SA1 features.
  t.fp1.interp = build_interp(t.sa1_coords, t.sa2_coords);
  {
    const Eigen::MatrixXd interp = apply_interp(t.fp1.interp, t.sa2.pooled);
    Eigen::MatrixXd cols(interp.rows() + t.sa1.pooled.rows(), interp.cols());
    cols << interp, t.sa1.pooled;
    mlp_forward(model.fp1_mlp, cols, &t.fp1.mlp, false);
  }

  // FP2: refined SA1 features -> every point, skip-concat raw scaled features.
  t.fp2.interp = build_interp(t.coords, t.sa1_coords);
  {
    const Eigen::MatrixXd interp = apply_interp(t.fp2.interp, t.fp1.mlp.acts.back());
    Eigen::MatrixXd cols(interp.rows() + 12, n);
    cols << interp, t.feats_scaled;
    mlp_forward(model.fp2_mlp, cols, &t.fp2.mlp, false);
  }

  const Eigen::MatrixXd logits = mlp_forward(model.head_mlp, t.fp2.mlp.acts.back(), &t.head,
                                             /*linear_last=*/true);
  t.logits = logits.row(0).transpose();
  t.probs = t.logits.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
  return t.probs;
}

void seg_backward(const SegModel& model, const ForwardTrace& t, const Eigen::VectorXd& dprobs,
                  SegModel& grads) {
  const int n = static_cast<int>(t.coords.size());
  // dL/dlogit through the sigmoid.
  Eigen::MatrixXd dlogits(1, n);
  for (int i = 0; i < n; ++i) dlogits(0, i) = dprobs(i) * t.probs(i) * (1.0 - t.probs(i));

  const Eigen::MatrixXd dg2 = mlp_backward(model.head_mlp, t.head, dlogits, grads.head_mlp, true);

  // FP2 backward: interp part feeds g1 (FP1 output); skip part is input features.
  Eigen::MatrixXd dg1 = Eigen::MatrixXd::Zero(t.fp1.mlp.acts.back().rows(),
                                              t.fp1.mlp.acts.back().cols());
  {
    const Eigen::MatrixXd dcols = mlp_backward(model.fp2_mlp, t.fp2.mlp, dg2, grads.fp2_mlp, false);
    backprop_interp(t.fp2.interp, dcols.topRows(dg1.rows()), dg1);
  }

  // FP1 backward: interp part feeds SA2 pooled features, skip part SA1 pooled.
  Eigen::MatrixXd df2 = Eigen::MatrixXd::Zero(t.sa2.pooled.rows(), t.sa2.pooled.cols());
  Eigen::MatrixXd df1 = Eigen::MatrixXd::Zero(t.sa1.pooled.rows(), t.sa1.pooled.cols());
  {
    const Eigen::MatrixXd dcols = mlp_backward(model.fp1_mlp, t.fp1.mlp, dg1, grads.fp1_mlp, false);
    backprop_interp(t.fp1.interp, dcols.topRows(df2.rows()), df2);
    df1 += dcols.bottomRows(df1.rows());
  }

  // SA2 backward adds its share of dL/df1.
  df1 += sa_backward(model.sa2_mlp, t.sa2, df2, grads.sa2_mlp,
                     static_cast<int>(t.sa1.pooled.rows()),
                     static_cast<int>(t.sa1.pooled.cols()));
  // SA1 backward; its input features are network inputs, gradients end here.
  sa_backward(model.sa1_mlp, t.sa1, df1, grads.sa1_mlp, 9, n);
}

}  // namespace rbd::seg
