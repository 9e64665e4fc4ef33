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

#include <cmath>
#include <random>
#include <vector>

#include "dressing/rollout.hpp"

namespace dressing {

// Measured arm fixtures (shoulder->elbow, elbow->hand).
inline const LimbLengths kMannequinArm{0.253, 0.264};
inline const LimbLengths kHuman1Arm{0.296, 0.305};
inline const LimbLengths kHuman2Arm{0.263, 0.275};

/// A natural-looking static demo posture with the requested elbow angle.
inline ArmPosture make_demo_posture(double psi, const LimbLengths& L,
                                    double alpha = -0.9, double beta = -0.25,
                                    double gamma = 0.4) {
  return forward_kinematics(JointAngles{alpha, beta, kPi - psi, gamma}, L);
}

namespace detail {

inline double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

/// Smooth bump on [lo, hi], zero with zero slope at both ends, peak 1 at
/// `peak` (a warped sin^2).
inline double bump(double s, double lo, double hi, double peak) {
  if (s <= lo || s >= hi) return 0.0;
  const double w = (s - lo) / (hi - lo);
  const double w_peak = std::clamp((peak - lo) / (hi - lo), 0.05, 0.95);
  const double p = std::log(0.5) / std::log(w_peak);
  const double t = std::sin(kPi * std::pow(w, p));
  return t * t;
}

/// +1 if rotating the body-side normal by +pi/2 about the travel tangent
/// points into the inner arm area at the elbow, else -1.
inline double inner_rotation_sign(const ArmPosture& posture,
                                  const ProgressCurve& curve, const Vec3& v) {
  const double s_mid =
      (curve.forearm_run + 0.5 * curve.arc_sweep * curve.radius) /
      curve.total_length;
  const CurveSample at = curve_sample(curve, s_mid * curve.total_length);
  const Vec3 bisector = ((posture.hand - posture.elbow).normalized() +
                         (posture.shoulder - posture.elbow).normalized())
                            .normalized();
  return at.tangent.cross(v).dot(bisector) >= 0.0 ? 1.0 : -1.0;
}

}  // namespace detail

struct SyntheticDemoParams {
  double l_start = 0.08;
  double l_end = 0.045;
  double l_bulge = 0.07;
  int samples = 60;
  double noise_l = 0.0005;
  double noise_theta = 0.01;
  double outer_threshold = 2.0944;  // ~120 deg: smaller angles dress outside
};

/// One synthetic expert demonstration on a static posture. Outer-strategy
/// demos (small elbow angle) swing the gripper around the back of the arm;
/// inner demos tilt mildly into the inner area. The path starts above the
/// hand and settles near the shoulder.
inline DemonstrationRecord synth_demo(const ArmPosture& posture,
                                      double arc_radius, std::uint64_t seed,
                                      const SyntheticDemoParams& params = {}) {
  const ProgressCurve curve = build_progress_curve(posture, arc_radius);
  const Vec3 v = arm_plane_normal(posture);
  const double psi = elbow_angle(posture);
  const double s_mid =
      (curve.forearm_run + 0.5 * curve.arc_sweep * curve.radius) /
      curve.total_length;
  const double inner_sign = detail::inner_rotation_sign(posture, curve, v);

  // Outer demos travel further around the arm and to the opposite side.
  const bool outer = psi < params.outer_threshold;
  const double psi_deg = psi * 180.0 / kPi;
  const double magnitude =
      outer ? 2.3 - 0.01 * (psi_deg - 80.0) : 1.2 - 0.01 * (psi_deg - 131.0);
  const double theta_peak = (outer ? -inner_sign : inner_sign) * magnitude;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  DemonstrationRecord demo;
  demo.posture = posture;
  for (int i = 0; i < params.samples; ++i) {
    // Denser sampling near the start: the gripper dwells above the hand
    // while engaging the sleeve.
    const double u = static_cast<double>(i) / (params.samples - 1);
    const double s = std::pow(u, 1.4);
    const double travel = detail::smoothstep((s - 0.12) / 0.78);
    const double hump = detail::bump(s, 0.2, 0.88, s_mid);
    const double settle = detail::smoothstep((s - 0.55) / 0.35);
    double l = params.l_start + (params.l_end - params.l_start) * travel +
               params.l_bulge * hump;
    double theta = theta_peak * (hump + 0.55 * settle * (1.0 - hump));
    if (i > 0) {  // the reference sample stays exact
      l += params.noise_l * noise(rng);
      theta += params.noise_theta * noise(rng);
    }
    demo.gripper_path.push_back(
        from_dressing({s, std::max(l, 0.0), theta}, posture, curve, v));
    demo.timestamps.push_back(0.1 * i);
  }
  return demo;
}

enum class DemoCorpus { Full, InnerOnly, OuterOnly };

/// Elbow angles of the demo postures, degrees.
inline const std::vector<double> kDemoElbowAnglesDeg{
    80.47, 81.65, 87.49, 106.07, 131.13, 143.46, 149.30, 160.98};

/// Synthetic demonstration corpus on the mannequin arm: two replicas per
/// posture with slightly jittered elbow angles so the mixtures see local
/// angle variation.
inline std::vector<DemonstrationRecord> make_demo_corpus(
    const LimbLengths& L, double arc_radius, std::uint64_t seed,
    DemoCorpus which = DemoCorpus::Full) {
  SyntheticDemoParams params;
  std::vector<DemonstrationRecord> demos;
  std::uint64_t demo_seed = seed;
  for (double deg : kDemoElbowAnglesDeg) {
    const bool outer = deg < 120.0;
    if (which == DemoCorpus::InnerOnly && outer) continue;
    if (which == DemoCorpus::OuterOnly && !outer) continue;
    for (double jitter : {-0.7, 0.7}) {
      const double psi = (deg + jitter) * kPi / 180.0;
      demos.push_back(
          synth_demo(make_demo_posture(psi, L), arc_radius, ++demo_seed,
                     params));
    }
  }
  return demos;
}

struct TrainedPolicy {
  GaussianMixture delta_l;
  GaussianMixture delta_theta;
};

inline TrainedPolicy train_policy(const std::vector<DemonstrationRecord>& demos,
                                  double arc_radius, int k,
                                  std::uint64_t seed) {
  const auto samples = transform_demos(demos, arc_radius);
  return {train_policy_mixture(samples, false, k, seed),
          train_policy_mixture(samples, true, k, seed + 1)};
}

/// Stretch-evaluation cases: one model-consistent case (identity weights,
/// no perturbation) and four perturbed cases with hand-motion bias and
/// per-step noise, against the reference stretch weights.
inline std::vector<RolloutConfig> make_estimation_cases(
    const LimbLengths& L) {
  auto base = [&](double psi_deg, double alpha, double gamma,
                  const Vec3& bias, double noise, std::uint64_t seed) {
    RolloutConfig cfg;
    cfg.initial_posture =
        make_demo_posture(psi_deg * kPi / 180.0, L, alpha, -0.25, gamma);
    cfg.limb_lengths = L;
    cfg.human.compliance_gain = 0.05;
    cfg.human.deviation_bias = bias;
    cfg.human.noise_std = noise;
    cfg.weights = kReferenceStretchWeights;
    cfg.max_steps = 220;
    cfg.dt = 0.02;
    cfg.seed = seed;
    cfg.mode = RolloutMode::NonCompliant;
    return cfg;
  };

  std::vector<RolloutConfig> cases;
  // Model-consistent reference: the hand follows exactly the motion model
  // the estimator assumes.
  RolloutConfig consistent =
      base(95.0, -0.9, 0.4, Vec3::Zero(), 0.0, 11);
  consistent.weights = EstimatorWeights::identity();
  consistent.mode = RolloutMode::Compliant;
  cases.push_back(consistent);

  cases.push_back(
      base(85.0, -0.8, 0.3, Vec3(0.0056, -0.0042, 0.0028), 0.0011, 21));
  cases.push_back(
      base(70.0, -1.0, 0.8, Vec3(-0.0042, 0.0056, 0.0), 0.0013, 22));
  cases.push_back(
      base(70.0, -0.7, -0.8, Vec3(0.0044, 0.0066, -0.0088), 0.0014, 23));
  cases.push_back(
      base(80.0, -1.1, -0.8, Vec3(-0.0052, -0.0026, 0.0039), 0.0014, 24));
  return cases;
}

/// Compliant end-to-end fixture: bent arm, passive human, trained policy.
inline RolloutConfig make_compliant_rollout(const TrainedPolicy& policy,
                                            const LimbLengths& L,
                                            std::uint64_t seed) {
  RolloutConfig cfg;
  cfg.initial_posture = make_demo_posture(120.0 * kPi / 180.0, L);
  cfg.limb_lengths = L;
  cfg.human.compliance_gain = 0.05;
  cfg.human.noise_std = 0.0;
  cfg.weights = kReferenceStretchWeights;
  cfg.dynamics = ProgressDynamics{0.01, 1.0};
  cfg.policy_l = policy.delta_l;
  cfg.policy_theta = policy.delta_theta;
  cfg.seed = seed;
  cfg.max_steps = 150;
  cfg.mode = RolloutMode::Compliant;
  return cfg;
}

/// Ablation fixture: sharply bent static arm with a policy trained only on
/// inner-strategy demonstrations.
inline RolloutConfig make_static_adversarial_rollout(
    const TrainedPolicy& inner_policy, const LimbLengths& L,
    std::uint64_t seed) {
  RolloutConfig cfg = make_compliant_rollout(inner_policy, L, seed);
  cfg.initial_posture = make_demo_posture(80.0 * kPi / 180.0, L);
  cfg.mode = RolloutMode::StaticArm;
  return cfg;
}

}  // namespace dressing
