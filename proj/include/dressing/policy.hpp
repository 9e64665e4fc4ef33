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

#include <vector>

#include "dressing/dressing_frame.hpp"
#include "dressing/geometry.hpp"
#include "dressing/gmm.hpp"

namespace dressing {

/// A kinesthetic dressing demonstration: a static arm posture and the
/// dressing robot's gripper path recorded against it.
struct DemonstrationRecord {
  ArmPosture posture;
  std::vector<Point3> gripper_path;
  std::vector<double> timestamps;

  void validate() const {
    if (gripper_path.size() < 2) {
      throw DomainError("demonstration path needs at least two points");
    }
    if (timestamps.size() != gripper_path.size()) {
      throw DomainError("demonstration timestamps do not match the path");
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
      if (!(timestamps[i] > timestamps[i - 1])) {
        throw DomainError("demonstration timestamps must strictly increase");
      }
    }
  }
};

/// One GMM training row: inputs (s, psi), outputs the changes in distance
/// and angle relative to the demonstration's starting point.
struct TrainingSample {
  double s = 0.0;
  double psi = 0.0;
  double delta_l = 0.0;
  double delta_theta = 0.0;
};

/// Progress dynamics s_{T+1} = s_T + min(c, s_target - s_T).
struct ProgressDynamics {
  double c = 0.01;
  double s_target = 1.0;

  void validate() const {
    if (!(c > 0.0)) throw DomainError("progress increment must be positive");
    if (!(s_target > 0.0) || s_target > 1.0) {
      throw DomainError("progress target must lie in (0, 1]");
    }
  }
};

inline double step_progress(double s, const ProgressDynamics& dyn) {
  dyn.validate();
  if (s > dyn.s_target + 1e-12) {
    throw DomainError("progress beyond the target");
  }
  return s + std::min(dyn.c, dyn.s_target - s);
}

/// Training samples of one demonstration plus the start reference the
/// deltas were taken against.
struct DemoTransform {
  std::vector<TrainingSample> samples;
  double l0 = 0.0;
  double theta0 = 0.0;
};

/// Converts one demonstration into training samples: every path point
/// becomes (s, psi, delta_l, delta_theta) with deltas taken against the
/// first point and theta unwrapped along the path so no sample jumps
/// across the 0/2pi seam.
inline DemoTransform transform_demo(const DemonstrationRecord& demo,
                                    double arc_radius) {
  demo.validate();
  const double psi = elbow_angle(demo.posture);
  const ProgressCurve curve = build_progress_curve(demo.posture, arc_radius);
  const Vec3 v = arm_plane_normal(demo.posture);

  DemoTransform out;
  double theta_prev_raw = 0.0, theta_unwrapped = 0.0;
  for (std::size_t i = 0; i < demo.gripper_path.size(); ++i) {
    const DressingCoord dc =
        to_dressing(demo.gripper_path[i], demo.posture, curve, v);
    if (i == 0) {
      theta_unwrapped = dc.theta;
      out.l0 = dc.l;
      out.theta0 = dc.theta;
    } else {
      theta_unwrapped += wrap_angle(dc.theta - theta_prev_raw);
    }
    theta_prev_raw = dc.theta;
    out.samples.push_back(
        {dc.s, psi, dc.l - out.l0, theta_unwrapped - out.theta0});
  }
  return out;
}

inline std::vector<TrainingSample> transform_demos(
    const std::vector<DemonstrationRecord>& demos, double arc_radius) {
  std::vector<TrainingSample> samples;
  for (const auto& demo : demos) {
    auto t = transform_demo(demo, arc_radius);
    samples.insert(samples.end(), t.samples.begin(), t.samples.end());
  }
  return samples;
}

/// Inverse of transform_demo: rebuilds the Cartesian path from samples and
/// the recorded start reference.
inline std::vector<Point3> invert_demo_transform(
    const std::vector<TrainingSample>& samples, double l0, double theta0,
    const ArmPosture& posture, double arc_radius) {
  const ProgressCurve curve = build_progress_curve(posture, arc_radius);
  const Vec3 v = arm_plane_normal(posture);
  std::vector<Point3> path;
  path.reserve(samples.size());
  for (const auto& s : samples) {
    path.push_back(from_dressing({s.s, l0 + s.delta_l, theta0 + s.delta_theta},
                                 posture, curve, v));
  }
  return path;
}

/// Builds the (s, psi) -> output training matrix for one of the two
/// mixtures. `use_theta` selects delta_theta, otherwise delta_l.
inline std::vector<VectorXd> training_matrix(
    const std::vector<TrainingSample>& samples, bool use_theta) {
  std::vector<VectorXd> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    VectorXd r(3);
    r << s.s, s.psi, (use_theta ? s.delta_theta : s.delta_l);
    rows.push_back(r);
  }
  return rows;
}

/// Default component count for the dressing mixtures.
inline constexpr int kDefaultPolicyComponents = 8;

/// Trains one dressing mixture on (s, psi) -> delta rows, recording the
/// input bounding box for extrapolation flagging.
inline GaussianMixture train_policy_mixture(
    const std::vector<TrainingSample>& samples, bool use_theta, int k,
    std::uint64_t seed) {
  const auto rows = training_matrix(samples, use_theta);
  GaussianMixture g = fit_gmm(rows, k, seed);
  g.input_dim = 2;
  g.output_dim = 1;
  g.input_lo = VectorXd::Constant(2, std::numeric_limits<double>::infinity());
  g.input_hi = VectorXd::Constant(2, -std::numeric_limits<double>::infinity());
  for (const auto& r : rows) {
    for (int j = 0; j < 2; ++j) {
      g.input_lo[j] = std::min(g.input_lo[j], r[j]);
      g.input_hi[j] = std::max(g.input_hi[j], r[j]);
    }
  }
  return g;
}

/// Next gripper waypoint plus non-fatal diagnostics.
struct Waypoint {
  Point3 point;
  bool extrapolated = false;   // (s, psi) outside the training hull
  bool radius_clamped = false;  // l0 + delta_l fell below zero
};

/// Queries both mixtures at (s, psi), offsets the demonstration-relative
/// start reference (l0, theta0), and maps the target back to Cartesian
/// space on the given posture's curve.
inline Waypoint generate_waypoint(const GaussianMixture& gmm_l,
                                  const GaussianMixture& gmm_theta, double s,
                                  double psi, double l0, double theta0,
                                  const ArmPosture& posture,
                                  const ProgressCurve& curve, const Vec3& v) {
  VectorXd input(2);
  input << s, psi;
  const double delta_l = gmr_condition(gmm_l, input).mean[0];
  const double delta_theta = gmr_condition(gmm_theta, input).mean[0];

  Waypoint wp;
  wp.extrapolated =
      !gmm_l.inside_input_box(input) || !gmm_theta.inside_input_box(input);
  double l = l0 + delta_l;
  if (l < 0.0) {
    l = 0.0;
    wp.radius_clamped = true;
  }
  wp.point = from_dressing({s, l, theta0 + delta_theta}, posture, curve, v);
  return wp;
}

}  // namespace dressing
