// Copyright 2026 The dressing-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: every subcommand is a thin shell over one
// library operation, so file output is bit-identical to calling the
// library directly.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dressing/io.hpp"
#include "dressing/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using namespace dressing;

int run_fit_weights(const std::string& in, const std::string& out,
                    bool regularized) {
  const auto trajectory = io::load_angle_trajectory(in);
  const EstimatorWeights w = compute_weights(trajectory, regularized);
  io::save_weights(out, w);
  std::printf("weights %s %s %s %s\n", io::format_double(w.q_diag[0]).c_str(),
              io::format_double(w.q_diag[1]).c_str(),
              io::format_double(w.q_diag[2]).c_str(),
              io::format_double(w.q_diag[3]).c_str());
  return 0;
}

int run_estimate(const std::string& in, const std::string& out,
                 const std::string& initial_path,
                 const std::string& weights_path,
                 const std::string& calibration_path) {
  const io::PostureTrace initial = io::load_posture_trace(initial_path);
  if (initial.postures.empty()) {
    throw ParseError(initial_path + ": no posture rows");
  }
  const EstimatorWeights weights = io::load_weights(weights_path);
  std::vector<Point3> hand_path = io::load_hand_path(in);
  if (!calibration_path.empty()) {
    const RigidTransform T = io::load_calibration(calibration_path);
    for (auto& p : hand_path) p = hand_in_dressing_frame(p, T);
  }
  const auto trace = track(initial.postures.front(), hand_path,
                           initial.limb_lengths, weights);
  io::save_posture_trace(out, trace, initial.limb_lengths);
  std::printf("estimated %zu postures\n", trace.size());
  return 0;
}

int run_transform(const std::string& in, const std::string& out,
                  double arc_radius, bool inverse) {
  if (inverse) {
    const io::TrainingSampleFile f = io::load_training_samples(in);
    const auto path = invert_demo_transform(f.samples, f.l0, f.theta0,
                                            f.posture, f.arc_radius);
    DemonstrationRecord demo;
    demo.posture = f.posture;
    demo.gripper_path = path;
    demo.timestamps = f.timestamps;
    io::save_demo(out, demo, LimbLengths{
                                 (f.posture.elbow - f.posture.shoulder).norm(),
                                 (f.posture.hand - f.posture.elbow).norm()});
    std::printf("reconstructed %zu path points\n", path.size());
    return 0;
  }
  const io::DemoFile f = io::load_demo(in);
  const DemoTransform t = transform_demo(f.demo, arc_radius);
  io::TrainingSampleFile sf;
  sf.samples = t.samples;
  sf.posture = f.demo.posture;
  sf.arc_radius = arc_radius;
  sf.l0 = t.l0;
  sf.theta0 = t.theta0;
  sf.timestamps = f.demo.timestamps;
  io::save_training_samples(out, sf);
  std::printf("transformed %zu samples\n", t.samples.size());
  return 0;
}

std::vector<int> parse_k_range(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ParseError("--k-range expects LO:HI");
  }
  int lo, hi;
  try {
    lo = std::stoi(spec.substr(0, colon));
    hi = std::stoi(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw ParseError("--k-range expects LO:HI with integers");
  }
  if (lo < 1 || hi < lo) throw ParseError("--k-range bounds out of order");
  std::vector<int> range;
  for (int k = lo; k <= hi; ++k) range.push_back(k);
  return range;
}

int run_train(const std::vector<std::string>& inputs, const std::string& out_l,
              const std::string& out_theta, int k, const std::string& k_range,
              std::uint64_t seed) {
  std::vector<TrainingSample> samples;
  for (const auto& path : inputs) {
    const auto f = io::load_training_samples(path);
    samples.insert(samples.end(), f.samples.begin(), f.samples.end());
  }
  int k_l = k, k_theta = k;
  if (!k_range.empty()) {
    const auto range = parse_k_range(k_range);
    k_l = select_k_bic(training_matrix(samples, false), range, seed);
    k_theta = select_k_bic(training_matrix(samples, true), range, seed);
  }
  const GaussianMixture gmm_l = train_policy_mixture(samples, false, k_l, seed);
  const GaussianMixture gmm_theta =
      train_policy_mixture(samples, true, k_theta, seed + 1);
  io::save_mixture(out_l, gmm_l);
  io::save_mixture(out_theta, gmm_theta);
  std::printf("trained k_l=%d k_theta=%d on %zu samples\n", k_l, k_theta,
              samples.size());
  return 0;
}

int run_rollout(const std::string& config_path, const std::string& trace_path,
                std::optional<std::uint64_t> seed_override) {
  RolloutConfig cfg = io::load_rollout_config(config_path);
  if (seed_override) cfg.seed = *seed_override;
  io::load_policies(cfg, fs::path(config_path).parent_path());
  const RolloutResult result = run_rollout(cfg);
  if (!trace_path.empty()) {
    io::save_rollout_trace(trace_path, result, cfg.dt);
  }
  double min_clearance = std::numeric_limits<double>::infinity();
  for (double c : result.clearance_trace) {
    min_clearance = std::min(min_clearance, c);
  }
  std::printf(
      "outcome=%s final_s=%s shoulder_distance=%s min_clearance=%s steps=%zu\n",
      outcome_name(result.outcome),
      io::format_double(result.s_trace.empty() ? 0.0 : result.s_trace.back())
          .c_str(),
      io::format_double((result.gripper_path.back() -
                         result.true_postures.back().shoulder)
                            .norm())
          .c_str(),
      io::format_double(min_clearance).c_str(), result.s_trace.size());
  return 0;
}

int run_classify(const std::string& demo_path, double arc_radius) {
  const io::DemoFile f = io::load_demo(demo_path);
  const ProgressCurve curve = build_progress_curve(f.demo.posture, arc_radius);
  const StrategyClassification c =
      classify_strategy(f.demo.gripper_path, f.demo.posture, curve);
  std::printf("%s %+.3f\n",
              c.label == StrategyLabel::Inner ? "Inner" : "Outer",
              c.signed_distance);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bimanual dressing assistance toolkit"};
  app.require_subcommand(1);

  // fit-weights
  std::string fw_in, fw_out;
  bool fw_regularized = false;
  auto* fit = app.add_subcommand(
      "fit-weights", "Fit estimator joint weights from an angle trajectory");
  fit->add_option("input", fw_in)->required();
  fit->add_option("output", fw_out)->required();
  fit->add_flag("--regularized", fw_regularized,
                "Regularize joints that never move instead of failing");

  // estimate
  std::string est_in, est_out, est_initial, est_weights, est_calibration;
  auto* est = app.add_subcommand(
      "estimate", "Track arm postures from a hand path");
  est->add_option("input", est_in)->required();
  est->add_option("output", est_out)->required();
  est->add_option("--initial", est_initial, "Initial posture file")
      ->required();
  est->add_option("--weights", est_weights, "Estimator weights file")
      ->required();
  est->add_option("--calibration", est_calibration,
                  "Optional rigid calibration applied to the input path");

  // transform
  std::string tr_in, tr_out;
  double tr_radius = 0.05;
  bool tr_inverse = false;
  auto* tr = app.add_subcommand(
      "transform", "Convert a demo to dressing-coordinate training samples");
  tr->add_option("input", tr_in)->required();
  tr->add_option("output", tr_out)->required();
  tr->add_option("--arc-radius", tr_radius, "Elbow arc radius (m)");
  tr->add_flag("--inverse", tr_inverse,
               "Reconstruct the Cartesian demo from samples");

  // train
  std::vector<std::string> train_in;
  std::string train_out_l, train_out_theta, train_k_range;
  int train_k = kDefaultPolicyComponents;
  std::uint64_t train_seed = 0;
  auto* train = app.add_subcommand(
      "train", "Train the two dressing mixtures from training samples");
  train->add_option("inputs", train_in)->required()->expected(-1);
  train->add_option("--out-l", train_out_l)->required();
  train->add_option("--out-theta", train_out_theta)->required();
  train->add_option("--k", train_k, "Component count (default 8)");
  train->add_option("--k-range", train_k_range,
                    "LO:HI, pick the component count by BIC");
  train->add_option("--seed", train_seed);

  // rollout
  std::string ro_config, ro_trace;
  std::optional<std::uint64_t> ro_seed;
  auto* ro = app.add_subcommand("rollout", "Run a closed-loop dressing rollout");
  ro->add_option("config", ro_config)->required();
  ro->add_option("--trace", ro_trace, "Output trace file");
  ro->add_option("--seed", ro_seed, "Override the config seed");

  // classify
  std::string cl_in;
  double cl_radius = 0.05;
  auto* cl = app.add_subcommand(
      "classify", "Classify a demo as inner or outer strategy");
  cl->add_option("input", cl_in)->required();
  cl->add_option("--arc-radius", cl_radius, "Elbow arc radius (m)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) return run_fit_weights(fw_in, fw_out, fw_regularized);
    if (est->parsed()) {
      return run_estimate(est_in, est_out, est_initial, est_weights,
                          est_calibration);
    }
    if (tr->parsed()) return run_transform(tr_in, tr_out, tr_radius, tr_inverse);
    if (train->parsed()) {
      return run_train(train_in, train_out_l, train_out_theta, train_k,
                       train_k_range, train_seed);
    }
    if (ro->parsed()) return run_rollout(ro_config, ro_trace, ro_seed);
    if (cl->parsed()) return run_classify(cl_in, cl_radius);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
