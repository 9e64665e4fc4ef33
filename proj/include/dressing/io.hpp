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

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dressing/rollout.hpp"

namespace dressing::io {

using nlohmann::json;

// All table files are comma-separated numeric rows behind a one-line JSON
// header comment carrying schema, version and units. Lengths are meters,
// angles radians, time seconds.

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes content atomically: temp file in the same directory, then rename.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct Table {
  json header;
  std::vector<std::vector<double>> rows;
};

inline std::string serialize_table(const Table& t) {
  std::ostringstream out;
  out << "# " << t.header.dump() << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << format_double(row[i]);
    }
    out << "\n";
  }
  return out.str();
}

inline Table parse_table(const std::string& text, const std::string& path) {
  Table t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ParseError(path + ": missing header line");
  }
  try {
    t.header = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    throw ParseError(path + ": bad header: " + e.what());
  }
  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    ++row_index;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      std::size_t used = 0;
      double value;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ParseError(path + ": row " + std::to_string(row_index) +
                         ": not a number: '" + cell + "'");
      }
      if (used != cell.size()) {
        throw ParseError(path + ": row " + std::to_string(row_index) +
                         ": trailing junk in '" + cell + "'");
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table load_table(const std::filesystem::path& path,
                        const std::string& expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Table t = parse_table(buf.str(), path.string());
  if (!t.header.contains("schema") ||
      t.header["schema"].get<std::string>() != expected_schema) {
    throw ParseError(path.string() + ": expected schema '" + expected_schema +
                     "'");
  }
  return t;
}

inline void check_row_width(const Table& t, std::size_t width,
                            const std::string& path) {
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].size() != width) {
      throw ParseError(path + ": row " + std::to_string(i + 1) + ": expected " +
                       std::to_string(width) + " columns, got " +
                       std::to_string(t.rows[i].size()));
    }
  }
}

inline void check_monotone_time(const Table& t, const std::string& path) {
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (!(t.rows[i][0] > t.rows[i - 1][0])) {
      throw ParseError(path + ": row " + std::to_string(i + 1) +
                       ": timestamps must strictly increase");
    }
  }
}

inline json base_header(const std::string& schema) {
  return json{{"schema", schema},
              {"version", 1},
              {"units", {{"length", "m"}, {"angle", "rad"}, {"time", "s"}}},
              {"frame", "shoulder"}};
}

// ---- joint-angle trajectories -------------------------------------------

inline void save_angle_trajectory(const std::filesystem::path& path,
                                  const std::vector<JointAngles>& q,
                                  double dt = 0.02) {
  Table t;
  t.header = base_header("joint_angles");
  t.header["columns"] = {"t", "alpha", "beta", "phi", "gamma"};
  for (std::size_t i = 0; i < q.size(); ++i) {
    t.rows.push_back({dt * i, q[i].alpha, q[i].beta, q[i].phi, q[i].gamma});
  }
  atomic_write(path, serialize_table(t));
}

inline std::vector<JointAngles> load_angle_trajectory(
    const std::filesystem::path& path) {
  const Table t = load_table(path, "joint_angles");
  check_row_width(t, 5, path.string());
  check_monotone_time(t, path.string());
  std::vector<JointAngles> q;
  q.reserve(t.rows.size());
  for (const auto& r : t.rows) q.push_back({r[1], r[2], r[3], r[4]});
  return q;
}

// ---- estimator weights ---------------------------------------------------

inline void save_weights(const std::filesystem::path& path,
                         const EstimatorWeights& w) {
  Table t;
  t.header = base_header("estimator_weights");
  t.header["columns"] = {"q_alpha", "q_beta", "q_phi", "q_gamma"};
  t.rows.push_back({w.q_diag[0], w.q_diag[1], w.q_diag[2], w.q_diag[3]});
  atomic_write(path, serialize_table(t));
}

inline EstimatorWeights load_weights(const std::filesystem::path& path) {
  const Table t = load_table(path, "estimator_weights");
  check_row_width(t, 4, path.string());
  if (t.rows.size() != 1) {
    throw ParseError(path.string() + ": expected exactly one row of weights");
  }
  EstimatorWeights w{
      Vec4(t.rows[0][0], t.rows[0][1], t.rows[0][2], t.rows[0][3])};
  w.validate();
  return w;
}

// ---- hand paths and posture traces --------------------------------------

inline void save_hand_path(const std::filesystem::path& path,
                           const std::vector<Point3>& points,
                           double dt = 0.02) {
  Table t;
  t.header = base_header("hand_path");
  t.header["columns"] = {"t", "x", "y", "z"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    t.rows.push_back({dt * i, points[i].x(), points[i].y(), points[i].z()});
  }
  atomic_write(path, serialize_table(t));
}

inline std::vector<Point3> load_hand_path(const std::filesystem::path& path) {
  const Table t = load_table(path, "hand_path");
  check_row_width(t, 4, path.string());
  check_monotone_time(t, path.string());
  std::vector<Point3> pts;
  pts.reserve(t.rows.size());
  for (const auto& r : t.rows) pts.emplace_back(r[1], r[2], r[3]);
  return pts;
}

inline std::vector<double> posture_row(double time, const ArmPosture& p) {
  return {time,        p.shoulder.x(), p.shoulder.y(), p.shoulder.z(),
          p.elbow.x(), p.elbow.y(),    p.elbow.z(),    p.hand.x(),
          p.hand.y(),  p.hand.z()};
}

inline ArmPosture posture_from_row(const std::vector<double>& r,
                                   std::size_t offset = 1) {
  ArmPosture p;
  p.shoulder = Point3(r[offset], r[offset + 1], r[offset + 2]);
  p.elbow = Point3(r[offset + 3], r[offset + 4], r[offset + 5]);
  p.hand = Point3(r[offset + 6], r[offset + 7], r[offset + 8]);
  return p;
}

inline void save_posture_trace(const std::filesystem::path& path,
                               const std::vector<ArmPosture>& postures,
                               const LimbLengths& L, double dt = 0.02) {
  Table t;
  t.header = base_header("posture_trace");
  t.header["columns"] = {"t",  "sx", "sy", "sz", "ex",
                         "ey", "ez", "hx", "hy", "hz"};
  t.header["limb_lengths"] = {L.upper_arm, L.forearm};
  for (std::size_t i = 0; i < postures.size(); ++i) {
    t.rows.push_back(posture_row(dt * i, postures[i]));
  }
  atomic_write(path, serialize_table(t));
}

struct PostureTrace {
  std::vector<ArmPosture> postures;
  LimbLengths limb_lengths;
};

inline PostureTrace load_posture_trace(const std::filesystem::path& path) {
  const Table t = load_table(path, "posture_trace");
  check_row_width(t, 10, path.string());
  check_monotone_time(t, path.string());
  PostureTrace trace;
  if (t.header.contains("limb_lengths")) {
    trace.limb_lengths = {t.header["limb_lengths"][0].get<double>(),
                          t.header["limb_lengths"][1].get<double>()};
  }
  for (const auto& r : t.rows) trace.postures.push_back(posture_from_row(r));
  return trace;
}

// ---- calibration ----------------------------------------------------------

inline void save_calibration(const std::filesystem::path& path,
                             const RigidTransform& T) {
  Table t;
  t.header = base_header("calibration");
  t.header["columns"] = {"r00", "r01", "r02", "r10", "r11", "r12",
                         "r20", "r21", "r22", "tx",  "ty",  "tz"};
  std::vector<double> row;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) row.push_back(T.rotation(i, j));
  }
  for (int i = 0; i < 3; ++i) row.push_back(T.translation[i]);
  t.rows.push_back(row);
  atomic_write(path, serialize_table(t));
}

inline RigidTransform load_calibration(const std::filesystem::path& path) {
  const Table t = load_table(path, "calibration");
  check_row_width(t, 12, path.string());
  if (t.rows.size() != 1) {
    throw ParseError(path.string() + ": expected exactly one calibration row");
  }
  RigidTransform T;
  const auto& r = t.rows[0];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) T.rotation(i, j) = r[3 * i + j];
  }
  T.translation = Vec3(r[9], r[10], r[11]);
  T.validate();
  return T;
}

// ---- demonstrations -------------------------------------------------------

inline void save_demo(const std::filesystem::path& path,
                      const DemonstrationRecord& demo, const LimbLengths& L) {
  Table t;
  t.header = base_header("demo");
  t.header["columns"] = {"t", "x", "y", "z"};
  t.header["posture"] = posture_row(0.0, demo.posture);
  t.header["posture"].erase(0);
  t.header["limb_lengths"] = {L.upper_arm, L.forearm};
  for (std::size_t i = 0; i < demo.gripper_path.size(); ++i) {
    t.rows.push_back({demo.timestamps[i], demo.gripper_path[i].x(),
                      demo.gripper_path[i].y(), demo.gripper_path[i].z()});
  }
  atomic_write(path, serialize_table(t));
}

struct DemoFile {
  DemonstrationRecord demo;
  LimbLengths limb_lengths;
};

inline DemoFile load_demo(const std::filesystem::path& path) {
  const Table t = load_table(path, "demo");
  check_row_width(t, 4, path.string());
  check_monotone_time(t, path.string());
  if (!t.header.contains("posture") || t.header["posture"].size() != 9) {
    throw ParseError(path.string() + ": missing or malformed posture header");
  }
  DemoFile f;
  std::vector<double> p{0.0};
  for (const auto& v : t.header["posture"]) p.push_back(v.get<double>());
  f.demo.posture = posture_from_row(p);
  if (t.header.contains("limb_lengths")) {
    f.limb_lengths = {t.header["limb_lengths"][0].get<double>(),
                      t.header["limb_lengths"][1].get<double>()};
  }
  for (const auto& r : t.rows) {
    f.demo.timestamps.push_back(r[0]);
    f.demo.gripper_path.emplace_back(r[1], r[2], r[3]);
  }
  return f;
}

// ---- training samples ------------------------------------------------------

/// The samples file header carries everything needed to invert the
/// transform: the demo posture, arc radius and the (l0, theta0) reference.
struct TrainingSampleFile {
  std::vector<TrainingSample> samples;
  ArmPosture posture;
  double arc_radius = 0.05;
  double l0 = 0.0;
  double theta0 = 0.0;
  std::vector<double> timestamps;
};

inline void save_training_samples(const std::filesystem::path& path,
                                  const TrainingSampleFile& f) {
  Table t;
  t.header = base_header("training_samples");
  t.header["columns"] = {"t", "s", "psi", "delta_l", "delta_theta"};
  t.header["posture"] = posture_row(0.0, f.posture);
  t.header["posture"].erase(0);
  t.header["arc_radius"] = f.arc_radius;
  t.header["start_reference"] = {f.l0, f.theta0};
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    const auto& s = f.samples[i];
    t.rows.push_back(
        {f.timestamps[i], s.s, s.psi, s.delta_l, s.delta_theta});
  }
  atomic_write(path, serialize_table(t));
}

inline TrainingSampleFile load_training_samples(
    const std::filesystem::path& path) {
  const Table t = load_table(path, "training_samples");
  check_row_width(t, 5, path.string());
  TrainingSampleFile f;
  if (t.header.contains("posture")) {
    std::vector<double> p{0.0};
    for (const auto& v : t.header["posture"]) p.push_back(v.get<double>());
    f.posture = posture_from_row(p);
  }
  f.arc_radius = t.header.value("arc_radius", 0.05);
  if (t.header.contains("start_reference")) {
    f.l0 = t.header["start_reference"][0].get<double>();
    f.theta0 = t.header["start_reference"][1].get<double>();
  }
  for (const auto& r : t.rows) {
    f.timestamps.push_back(r[0]);
    f.samples.push_back({r[1], r[2], r[3], r[4]});
  }
  return f;
}

// ---- mixture models --------------------------------------------------------

inline json mixture_to_json(const GaussianMixture& g) {
  json j;
  j["schema"] = "gmm";
  j["version"] = 1;
  j["input_dim"] = g.input_dim;
  j["output_dim"] = g.output_dim;
  j["weights"] = std::vector<double>(g.weights.begin(), g.weights.end());
  for (const auto& m : g.means) {
    j["means"].push_back(std::vector<double>(m.begin(), m.end()));
  }
  for (const auto& cov : g.covariances) {
    std::vector<double> flat;  // row-major
    for (int i = 0; i < cov.rows(); ++i) {
      for (int c = 0; c < cov.cols(); ++c) flat.push_back(cov(i, c));
    }
    j["covariances"].push_back(flat);
  }
  if (g.input_lo.size() == g.input_dim && g.input_dim > 0) {
    j["input_lo"] = std::vector<double>(g.input_lo.begin(), g.input_lo.end());
    j["input_hi"] = std::vector<double>(g.input_hi.begin(), g.input_hi.end());
  }
  return j;
}

inline GaussianMixture mixture_from_json(const json& j,
                                         const std::string& path) {
  if (!j.contains("schema") || j["schema"] != "gmm") {
    throw ParseError(path + ": not a mixture model file");
  }
  GaussianMixture g;
  try {
    g.input_dim = j["input_dim"].get<int>();
    g.output_dim = j["output_dim"].get<int>();
    const auto w = j["weights"].get<std::vector<double>>();
    g.weights = Eigen::Map<const VectorXd>(w.data(), w.size());
    const int d = g.input_dim + g.output_dim;
    for (const auto& m : j["means"]) {
      const auto v = m.get<std::vector<double>>();
      g.means.push_back(Eigen::Map<const VectorXd>(v.data(), v.size()));
    }
    for (const auto& cj : j["covariances"]) {
      const auto flat = cj.get<std::vector<double>>();
      MatrixXd cov(d, d);
      for (int i = 0; i < d; ++i) {
        for (int c = 0; c < d; ++c) cov(i, c) = flat[d * i + c];
      }
      g.covariances.push_back(cov);
    }
    if (j.contains("input_lo")) {
      const auto lo = j["input_lo"].get<std::vector<double>>();
      const auto hi = j["input_hi"].get<std::vector<double>>();
      g.input_lo = Eigen::Map<const VectorXd>(lo.data(), lo.size());
      g.input_hi = Eigen::Map<const VectorXd>(hi.data(), hi.size());
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": malformed mixture: " + e.what());
  }
  g.validate();
  return g;
}

inline void save_mixture(const std::filesystem::path& path,
                         const GaussianMixture& g) {
  atomic_write(path, mixture_to_json(g).dump(2) + "\n");
}

inline GaussianMixture load_mixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": bad JSON: " + e.what());
  }
  return mixture_from_json(j, path.string());
}

// ---- rollout configs and traces ---------------------------------------------

inline RolloutMode mode_from_string(const std::string& s) {
  if (s == "compliant") return RolloutMode::Compliant;
  if (s == "noncompliant") return RolloutMode::NonCompliant;
  if (s == "static") return RolloutMode::StaticArm;
  throw ParseError("unknown rollout mode '" + s + "'");
}

inline std::string mode_to_string(RolloutMode m) {
  switch (m) {
    case RolloutMode::Compliant: return "compliant";
    case RolloutMode::NonCompliant: return "noncompliant";
    default: return "static";
  }
}

inline void save_rollout_config(const std::filesystem::path& path,
                                const RolloutConfig& cfg) {
  json j;
  j["schema"] = "rollout_config";
  j["version"] = 1;
  auto pr = posture_row(0.0, cfg.initial_posture);
  pr.erase(pr.begin());
  j["initial_posture"] = pr;
  j["limb_lengths"] = {cfg.limb_lengths.upper_arm, cfg.limb_lengths.forearm};
  j["human"] = {{"compliance_gain", cfg.human.compliance_gain},
                {"deviation_bias",
                 {cfg.human.deviation_bias.x(), cfg.human.deviation_bias.y(),
                  cfg.human.deviation_bias.z()}},
                {"noise_std", cfg.human.noise_std}};
  j["stiffness"] = {{"k_x", cfg.stiffness.k_x},
                    {"damping", cfg.stiffness.damping}};
  j["weights"] = {cfg.weights.q_diag[0], cfg.weights.q_diag[1],
                  cfg.weights.q_diag[2], cfg.weights.q_diag[3]};
  j["dynamics"] = {{"c", cfg.dynamics.c}, {"s_target", cfg.dynamics.s_target}};
  j["policy_l"] = cfg.policy_l_path;
  j["policy_theta"] = cfg.policy_theta_path;
  j["arc_radius"] = cfg.arc_radius;
  j["seed"] = cfg.seed;
  j["max_steps"] = cfg.max_steps;
  j["mode"] = mode_to_string(cfg.mode);
  j["dt"] = cfg.dt;
  j["start_reference"] = {cfg.start_l, cfg.start_theta};
  j["thresholds"] = {{"shoulder_radius", cfg.thresholds.shoulder_radius},
                     {"collision_floor", cfg.thresholds.collision_floor}};
  atomic_write(path, j.dump(2) + "\n");
}

inline RolloutConfig load_rollout_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": bad JSON: " + e.what());
  }
  RolloutConfig cfg;
  try {
    if (j.value("schema", "") != "rollout_config") {
      throw ParseError(path.string() + ": not a rollout config");
    }
    std::vector<double> p{0.0};
    for (const auto& v : j["initial_posture"]) p.push_back(v.get<double>());
    if (p.size() != 10) {
      throw ParseError(path.string() + ": initial_posture needs 9 numbers");
    }
    cfg.initial_posture = posture_from_row(p);
    cfg.limb_lengths = {j["limb_lengths"][0].get<double>(),
                        j["limb_lengths"][1].get<double>()};
    cfg.human.compliance_gain = j["human"]["compliance_gain"].get<double>();
    const auto& bias = j["human"]["deviation_bias"];
    cfg.human.deviation_bias =
        Vec3(bias[0].get<double>(), bias[1].get<double>(),
             bias[2].get<double>());
    cfg.human.noise_std = j["human"]["noise_std"].get<double>();
    cfg.stiffness.k_x = j["stiffness"]["k_x"].get<double>();
    cfg.stiffness.damping = j["stiffness"]["damping"].get<double>();
    for (int i = 0; i < 4; ++i) {
      cfg.weights.q_diag[i] = j["weights"][i].get<double>();
    }
    cfg.dynamics.c = j["dynamics"]["c"].get<double>();
    cfg.dynamics.s_target = j["dynamics"]["s_target"].get<double>();
    cfg.policy_l_path = j.value("policy_l", "");
    cfg.policy_theta_path = j.value("policy_theta", "");
    cfg.arc_radius = j.value("arc_radius", 0.05);
    cfg.seed = j.value("seed", 0ULL);
    cfg.max_steps = j.value("max_steps", 200);
    cfg.mode = mode_from_string(j.value("mode", "compliant"));
    cfg.dt = j.value("dt", 0.02);
    if (j.contains("start_reference")) {
      cfg.start_l = j["start_reference"][0].get<double>();
      cfg.start_theta = j["start_reference"][1].get<double>();
    }
    if (j.contains("thresholds")) {
      cfg.thresholds.shoulder_radius =
          j["thresholds"]["shoulder_radius"].get<double>();
      cfg.thresholds.collision_floor =
          j["thresholds"]["collision_floor"].get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": malformed config: " + e.what());
  }
  return cfg;
}

/// Resolves the policy files referenced by a config, relative to its
/// directory.
inline void load_policies(RolloutConfig& cfg,
                          const std::filesystem::path& config_dir) {
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : config_dir / fp;
  };
  if (!cfg.policy_l) cfg.policy_l = load_mixture(resolve(cfg.policy_l_path));
  if (!cfg.policy_theta) {
    cfg.policy_theta = load_mixture(resolve(cfg.policy_theta_path));
  }
}

inline void save_rollout_trace(const std::filesystem::path& path,
                               const RolloutResult& r, double dt = 0.02) {
  Table t;
  t.header = base_header("rollout_trace");
  t.header["columns"] = {
      "t",   "sx",  "sy",  "sz",  "ex",  "ey",  "ez",  "hx",  "hy",
      "hz",  "esx", "esy", "esz", "eex", "eey", "eez", "ehx", "ehy",
      "ehz", "gx",  "gy",  "gz",  "s",   "elbow_error", "clearance"};
  t.header["outcome"] = outcome_name(r.outcome);
  t.header["outcome_detail"] = r.outcome_detail;
  for (std::size_t i = 0; i < r.true_postures.size(); ++i) {
    std::vector<double> row = posture_row(dt * i, r.true_postures[i]);
    const auto est = posture_row(0.0, r.estimated_postures[i]);
    row.insert(row.end(), est.begin() + 1, est.end());
    row.push_back(r.gripper_path[i].x());
    row.push_back(r.gripper_path[i].y());
    row.push_back(r.gripper_path[i].z());
    row.push_back(r.s_trace[i]);
    row.push_back(r.elbow_error_trace[i]);
    row.push_back(r.clearance_trace[i]);
    t.rows.push_back(std::move(row));
  }
  atomic_write(path, serialize_table(t));
}

}  // namespace dressing::io
