#include "rbd/eval/report.hpp"
#include "rbd/eval/svg.hpp"
#include "rbd/fit/gpr.hpp"
#include "rbd/seg/checkpoint.hpp"
#include "rbd/seg/train.hpp"
#include "rbd/sim/dataset.hpp"
#include "rbd/sim/render.hpp"
#include "rbd/util/fileio.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

namespace {

using namespace rbd;
using nlohmann::ordered_json;

struct CommonOpts {
  std::uint64_t seed = 0;
  prep::FilterConfig filter;
};

void add_filter_options(CLI::App* cmd, prep::FilterConfig& f) {
  cmd->add_option("--z-max", f.z_max, "Height filter upper bound [m]")->capture_default_str();
  cmd->add_option("--z-min", f.z_min, "Height filter lower bound [m]")->capture_default_str();
  cmd->add_option("--doppler-dev-max", f.doppler_dev_max,
                  "Max Doppler deviation from static expectation [m/s]")
      ->capture_default_str();
}

void configure(CLI::App* cmd) {
  // Placeholder for --help only; the file is applied before CLI11 parsing
  // (see apply_config_file) so that explicit CLI flags override config keys.
  static std::string dummy;
  cmd->add_option("--config", dummy, "TOML-style key=value config file (CLI flags override)");
}

// Flat TOML-style config: `key = value` lines, # comments, quoted strings.
// Each key maps to the subcommand option --key; keys the user already passed
// on the command line are skipped; unknown keys fail via CLI11's extras error.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;

  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));

  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config line " + std::to_string(line_no) +
                                              ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string flag = "--" + key;
    if (given.count(flag)) continue;  // CLI flag wins
    args.push_back(flag + "=" + value);
  }
  return args;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string kind = "straight";
  int frames = 100;
  std::uint64_t seed = 0;
  std::string out;
  double noise_scale = 1.0;
  sim::RadarModel radar;
};

void run_simulate(const SimulateArgs& a) {
  const sim::Scenario scenario = sim::build_scenario(sim::parse_scenario_kind(a.kind), a.seed);
  if (a.frames > static_cast<int>(scenario.ego_trajectory.size()))
    throw std::runtime_error("frames exceeds the scenario trajectory span");
  const sim::RadarModel radar = a.radar.scaled_noise(a.noise_scale);
  sim::write_dataset(sim::render_sequence(scenario, radar, a.frames, a.seed), a.out);
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string data, out, loss_csv;
  seg::TrainConfig train;
  seg::LossConfig loss;
  prep::FilterConfig filter;
  bool no_distance_loss = false;
  bool no_temporal = false;
  bool no_flip = false;
};

void run_train(TrainArgs a) {
  if (a.no_distance_loss) a.loss.lambda_dist = 0.0;
  a.train.use_temporal = !a.no_temporal;
  a.train.augment_flip = !a.no_flip;

  const auto frames = sim::read_dataset(a.data);
  seg::SegModel model = seg::SegModel::init(seg::SegNetConfig{}, a.train.seed);
  const seg::TrainResult result = seg::train(frames, model, a.train, a.loss, a.filter);
  seg::save_model(model, a.out);

  std::ostringstream csv;
  csv.precision(17);
  csv << "epoch,total,bce,dist\n";
  for (size_t e = 0; e < result.trace.size(); ++e)
    csv << e << ',' << result.trace[e].total << ',' << result.trace[e].bce << ','
        << result.trace[e].dist << '\n';
  atomic_write(a.loss_csv.empty() ? a.out + ".loss.csv" : a.loss_csv, csv.str());
}

// ---- infer ----------------------------------------------------------------

struct InferArgs {
  std::string data, model, out;
  bool no_temporal = false;
  prep::FilterConfig filter;
};

void run_infer(const InferArgs& a) {
  const auto frames = sim::read_dataset(a.data);
  seg::SegModel model = seg::load_model(a.model);
  std::string out;
  for (const auto& seq : sim::split_sequences(frames)) {
    const auto dets = seg::run_sequence(model, seq, a.filter, a.no_temporal);
    for (size_t i = 0; i < seq.size(); ++i) {
      ordered_json j;
      j["t"] = seq[i].timestamp;
      j["probs"] = dets[i].probs;
      j["pred"] = dets[i].pred;
      out += j.dump();
      out += '\n';
    }
  }
  atomic_write(a.out, out);
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string data, model, report_dir;
  std::string arm = "full";
  bool no_temporal = false;
  bool oracle = false;
  std::uint64_t seed = 0;
  prep::FilterConfig filter;
  fit::ClusterConfig cluster;
  fit::GPRConfig gpr;
};

ordered_json curves_to_json(const std::vector<fit::BoundaryCurve>& curves) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : curves) {
    ordered_json j;
    j["cluster_id"] = c.cluster_id;
    j["y_grid"] = c.y_grid;
    j["mean_x"] = c.mean_x;
    j["ci_half_width"] = c.ci_half_width;
    arr.push_back(std::move(j));
  }
  return arr;
}

void write_scatter_svg(const std::filesystem::path& path, const prep::FeatureCloud& cloud,
                       const seg::Detection& det, const std::vector<fit::BoundaryCurve>& curves,
                       const std::vector<Vec2>& det_xy) {
  eval::SvgCanvas svg(-40, 40, -10, 85, 520, 640, "top view: detections and fitted curves");
  for (size_t i = 0; i < cloud.size(); ++i) {
    const bool pred = i < det.pred.size() && det.pred[i];
    svg.circle(cloud.pts[i].x, cloud.pts[i].y, 2.0, pred ? "#d62728" : "#1f77b4",
               pred ? 0.85 : 0.45);
  }
  for (const auto& c : curves) {
    std::vector<std::pair<double, double>> line;
    std::vector<double> ys, lo, hi;
    for (size_t i = 0; i < c.y_grid.size(); ++i) {
      line.push_back({c.mean_x[i], c.y_grid[i]});
      ys.push_back(c.y_grid[i]);
      lo.push_back(c.mean_x[i] - c.ci_half_width[i]);
      hi.push_back(c.mean_x[i] + c.ci_half_width[i]);
    }
    // band() spans the y axis of the plot; our curves run along plot-y, so
    // draw the CI as two dashed rails instead.
    std::vector<std::pair<double, double>> rail_lo, rail_hi;
    for (size_t i = 0; i < ys.size(); ++i) {
      rail_lo.push_back({lo[i], ys[i]});
      rail_hi.push_back({hi[i], ys[i]});
    }
    svg.polyline(line, "#2ca02c", 2.5);
    svg.polyline(rail_lo, "#2ca02c", 1.0, true);
    svg.polyline(rail_hi, "#2ca02c", 1.0, true);
  }
  (void)det_xy;
  atomic_write(path, svg.str());
}

void write_metric_traces_svg(const std::filesystem::path& path, const eval::EvalReport& report) {
  double t_max = 1.0, m_max = 1.0;
  for (const auto& f : report.frames) {
    t_max = std::max(t_max, static_cast<double>(f.frame));
    if (f.hausdorff) m_max = std::max(m_max, *f.hausdorff);
  }
  eval::SvgCanvas svg(0, t_max, 0, std::max(1.05, m_max * 1.05), 760, 420,
                      "per-frame accuracy, chamfer, hausdorff");
  std::vector<std::pair<double, double>> acc, cd, hd;
  for (const auto& f : report.frames) {
    acc.push_back({static_cast<double>(f.frame), f.accuracy});
    if (f.chamfer) cd.push_back({static_cast<double>(f.frame), *f.chamfer});
    if (f.hausdorff) hd.push_back({static_cast<double>(f.frame), *f.hausdorff});
  }
  svg.polyline(acc, "#1f77b4", 1.5);
  svg.polyline(cd, "#2ca02c", 1.5);
  svg.polyline(hd, "#d62728", 1.5);
  svg.text(1.0, std::max(1.05, m_max * 1.05) * 0.97, "blue: accuracy, green: chamfer [m], red: hausdorff [m]");
  atomic_write(path, svg.str());
}

void run_eval(const EvalArgs& a) {
  const auto frames = sim::read_dataset(a.data);
  std::optional<seg::SegModel> model;
  if (!a.oracle) model = seg::load_model(a.model);

  eval::EvalOptions opts;
  opts.temporal_ablation = a.no_temporal;
  opts.oracle = a.oracle;
  opts.arm = a.oracle ? "oracle" : a.arm;

  std::vector<std::vector<seg::Detection>> dets;
  std::vector<std::vector<prep::FeatureCloud>> clouds;
  const eval::EvalReport report =
      eval::evaluate_dataset(model ? &*model : nullptr, frames, a.filter, opts, &dets, &clouds);

  const std::filesystem::path dir = a.report_dir;
  atomic_write(dir / "report.json", report.to_json().dump(2) + "\n");
  atomic_write(dir / "frames.csv", report.to_csv());
  for (size_t s = 0; s < dets.size(); ++s) {
    if (dets[s].empty()) continue;
    const size_t last = dets[s].size() - 1;
    std::vector<Vec2> det_xy;
    for (const Vec3& p : dets[s][last].boundary_coords()) det_xy.push_back(p.head<2>());
    std::vector<fit::BoundaryCurve> curves;
    if (det_xy.size() >= 2) curves = fit::fit_boundaries(det_xy, a.cluster, a.gpr, a.seed);
    const std::string tag = "seq" + std::to_string(s);
    atomic_write(dir / ("curves_" + tag + ".json"), curves_to_json(curves).dump(2) + "\n");
    write_scatter_svg(dir / ("scatter_" + tag + ".svg"), clouds[s][last], dets[s][last], curves,
                      det_xy);
  }
  write_metric_traces_svg(dir / "metrics.svg", report);
  std::cout << "arm=" << report.arm << " accuracy=" << report.accuracy;
  if (report.median_chamfer) std::cout << " median_chamfer=" << *report.median_chamfer;
  if (report.median_hausdorff) std::cout << " median_hausdorff=" << *report.median_hausdorff;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"road boundary detection from 4D mmWave radar point clouds"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* c_sim = app.add_subcommand("simulate", "Generate a labeled synthetic dataset");
  configure(c_sim);
  c_sim->add_option("--kind", sim_args.kind, "straight|curved|fork|intersection|urban")
      ->capture_default_str();
  c_sim->add_option("--frames", sim_args.frames, "Number of frames (10 Hz)")->capture_default_str();
  c_sim->add_option("--seed", sim_args.seed, "Root random seed")->capture_default_str();
  c_sim->add_option("--out", sim_args.out, "Output dataset (.jsonl or .jsonl.gz)")->required();
  c_sim->add_option("--noise-scale", sim_args.noise_scale,
                    "Scale factor on all radar noise knobs")->capture_default_str();
  c_sim->add_option("--max-range", sim_args.radar.max_range, "Radar range [m]")->capture_default_str();
  c_sim->add_option("--dropout-prob", sim_args.radar.dropout_prob,
                    "Boundary sample dropout probability")->capture_default_str();
  c_sim->add_option("--pos-noise", sim_args.radar.pos_noise_lateral,
                    "Lateral/longitudinal position noise sigma [m]")->capture_default_str();
  c_sim->add_option("--pos-noise-vertical", sim_args.radar.pos_noise_vertical,
                    "Vertical position noise sigma [m]")->capture_default_str();
  c_sim->add_option("--doppler-noise", sim_args.radar.doppler_noise,
                    "Doppler noise sigma [m/s]")->capture_default_str();
  c_sim->add_option("--sample-spacing", sim_args.radar.boundary_sample_spacing,
                    "Boundary scatterer spacing [m]")->capture_default_str();

  TrainArgs train_args;
  CLI::App* c_train = app.add_subcommand("train", "Train the segmentation model");
  configure(c_train);
  c_train->add_option("--data", train_args.data, "Training dataset path")->required();
  c_train->add_option("--out", train_args.out, "Output model checkpoint")->required();
  c_train->add_option("--loss-csv", train_args.loss_csv,
                      "Loss trace CSV path (default: <out>.loss.csv)");
  c_train->add_option("--epochs", train_args.train.epochs, "Training epochs")->capture_default_str();
  c_train->add_option("--lr", train_args.train.lr, "Adam learning rate")->capture_default_str();
  c_train->add_option("--seed", train_args.train.seed, "Root random seed")->capture_default_str();
  c_train->add_option("--max-points", train_args.train.max_points,
                      "Per-frame point cap (random subsample above)")->capture_default_str();
  c_train->add_option("--lambda-dist", train_args.loss.lambda_dist,
                      "Distance loss weight")->capture_default_str();
  c_train->add_option("--dist-clamp", train_args.loss.dist_clamp,
                      "Distance loss clamp [m]")->capture_default_str();
  c_train->add_flag("--no-distance-loss", train_args.no_distance_loss,
                    "Ablation: train with BCE only (lambda = 0)");
  c_train->add_flag("--no-temporal", train_args.no_temporal,
                    "Ablation: train with default temporal features");
  c_train->add_flag("--no-flip", train_args.no_flip, "Disable x-flip augmentation");
  add_filter_options(c_train, train_args.filter);

  InferArgs infer_args;
  CLI::App* c_infer = app.add_subcommand("infer", "Run sequential inference");
  configure(c_infer);
  c_infer->add_option("--data", infer_args.data, "Dataset path")->required();
  c_infer->add_option("--model", infer_args.model, "Model checkpoint")->required();
  c_infer->add_option("--out", infer_args.out, "Output detections JSONL")->required();
  c_infer->add_flag("--no-temporal", infer_args.no_temporal,
                    "Ablation: default temporal features every frame");
  add_filter_options(c_infer, infer_args.filter);

  EvalArgs eval_args;
  CLI::App* c_eval = app.add_subcommand("eval", "Evaluate a model and emit reports/plots");
  configure(c_eval);
  c_eval->add_option("--data", eval_args.data, "Dataset path")->required();
  c_eval->add_option("--model", eval_args.model, "Model checkpoint");
  c_eval->add_option("--report-dir", eval_args.report_dir, "Output directory")->required();
  c_eval->add_option("--arm", eval_args.arm, "Ablation arm label for the report")
      ->capture_default_str();
  c_eval->add_flag("--no-temporal", eval_args.no_temporal,
                   "Ablation: default temporal features every frame");
  c_eval->add_flag("--oracle", eval_args.oracle,
                   "Feed ground-truth labels as probabilities (perfect detector)");
  c_eval->add_option("--seed", eval_args.seed, "Root random seed (curve-fit subsampling)")
      ->capture_default_str();
  add_filter_options(c_eval, eval_args.filter);
  c_eval->add_option("--y-scale", eval_args.cluster.y_scale,
                     "Divide y by this before clustering")->capture_default_str();
  c_eval->add_option("--cluster-eps", eval_args.cluster.eps,
                     "DBSCAN eps in scaled space [m]")->capture_default_str();
  c_eval->add_option("--min-pts", eval_args.cluster.min_pts, "DBSCAN min_pts")
      ->capture_default_str();
  c_eval->add_option("--gap-split", eval_args.cluster.gap_split,
                     "Split clusters on y-gaps larger than this [m]")->capture_default_str();
  c_eval->add_option("--subsample-max", eval_args.cluster.subsample_max,
                     "GPR training subsample cap")->capture_default_str();
  c_eval->add_option("--ci-threshold", eval_args.cluster.ci_threshold,
                     "Full CI width that triggers re-clustering [m]")->capture_default_str();
  c_eval->add_option("--recluster-depth", eval_args.cluster.max_recluster_depth,
                     "Max re-cluster recursion depth")->capture_default_str();
  c_eval->add_option("--lengthscale", eval_args.gpr.lengthscale,
                     "Matern lengthscale [m]")->capture_default_str();
  c_eval->add_option("--signal-variance", eval_args.gpr.signal_variance,
                     "Kernel signal variance [m^2]")->capture_default_str();
  c_eval->add_option("--noise-variance", eval_args.gpr.noise_variance,
                     "Observation noise variance [m^2]")->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_file(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (c_sim->parsed()) run_simulate(sim_args);
    if (c_train->parsed()) run_train(train_args);
    if (c_infer->parsed()) run_infer(infer_args);
    if (c_eval->parsed()) {
      if (!eval_args.oracle && eval_args.model.empty())
        throw std::runtime_error("eval: --model required unless --oracle");
      run_eval(eval_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
