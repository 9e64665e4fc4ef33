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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dressing/policy.hpp"
#include "dressing/stretch.hpp"

namespace dressing {

enum class RolloutMode { Compliant, NonCompliant, StaticArm };

enum class Outcome { Success, CollisionFailure, NoConvergence };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Success: return "Success";
    case Outcome::CollisionFailure: return "CollisionFailure";
    default: return "NoConvergence";
  }
}

struct SuccessThresholds {
  double shoulder_radius = 0.06;  // final gripper distance to the shoulder
  double collision_floor = 0.015;  // min radial clearance to the true curve
};

struct RolloutConfig {
  ArmPosture initial_posture;
  LimbLengths limb_lengths;
  HumanResponseModel human;
  StiffnessConfig stiffness;
  EstimatorWeights weights;
  ProgressDynamics dynamics;
  std::string policy_l_path, policy_theta_path;  // loaded by the CLI layer
  std::optional<GaussianMixture> policy_l, policy_theta;
  double arc_radius = 0.05;
  std::uint64_t seed = 0;
  int max_steps = 200;
  RolloutMode mode = RolloutMode::Compliant;
  double dt = 0.02;
  double start_l = 0.08;     // gripper start: above the hand at this radius
  double start_theta = 0.0;  // ... measured from the body-side normal
  SuccessThresholds thresholds;
};

struct RolloutResult {
  std::vector<ArmPosture> true_postures, estimated_postures;
  std::vector<Point3> gripper_path;
  std::vector<double> s_trace;
  std::vector<double> elbow_error_trace;  // |p_e true - p_e estimated|
  std::vector<double> clearance_trace;    // l of the gripper vs true posture
  Outcome outcome = Outcome::NoConvergence;
  std::string outcome_detail;
};

/// Success iff progress reached the target, the gripper ended within the
/// shoulder radius, and the gripper never dipped below the collision floor
/// (radial clearance measured against the true posture).
inline Outcome evaluate_success(const RolloutResult& r,
                                const ArmPosture& true_final,
                                const SuccessThresholds& thresholds,
                                double s_target, std::string* detail = nullptr) {
  auto set = [&](const char* msg) {
    if (detail) *detail = msg;
  };
  if (r.s_trace.empty() || r.s_trace.back() < s_target - 1e-12) {
    set("progress did not reach the target");
    return Outcome::NoConvergence;
  }
  for (double clearance : r.clearance_trace) {
    if (clearance < thresholds.collision_floor) {
      set("gripper clearance fell below the collision floor");
      return Outcome::CollisionFailure;
    }
  }
  if ((r.gripper_path.back() - true_final.shoulder).norm() >
      thresholds.shoulder_radius) {
    set("gripper stopped away from the shoulder");
    return Outcome::NoConvergence;
  }
  set("reached the shoulder without collision");
  return Outcome::Success;
}

/// Closed-loop rollout wiring the three blocks: the stretch controller
/// guides the simulated human hand, the estimator tracks the posture from
/// that hand alone, and the motion generator produces gripper waypoints on
/// the ESTIMATED posture. Ground truth is logged for error measurement
/// only. Deterministic per seed.
inline RolloutResult run_rollout(const RolloutConfig& cfg) {
  cfg.limb_lengths.validate();
  cfg.human.validate();
  cfg.stiffness.validate();
  cfg.weights.validate();
  cfg.dynamics.validate();
  if (cfg.max_steps < 1) throw DomainError("max_steps must be positive");
  if (!cfg.policy_l || !cfg.policy_theta) {
    throw DomainError("rollout policies are not loaded");
  }

  const LimbLengths& L = cfg.limb_lengths;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  RolloutResult res;
  try {
    PostureEstimate truth{joint_angles_from_posture(cfg.initial_posture, L),
                          0};
    PostureEstimate est = truth;
    Point3 hand = forward_kinematics_hand(truth.q_hat, L);
    Point3 desired = hand;

    ArmPosture true_posture = forward_kinematics(truth.q_hat, L);
    ArmPosture est_posture = true_posture;
    Vec3 v_est = arm_plane_normal(est_posture);
    Vec3 v_true = v_est;

    ProgressCurve est_curve = build_progress_curve(est_posture, cfg.arc_radius);
    Point3 gripper = from_dressing({0.0, cfg.start_l, cfg.start_theta},
                                   est_posture, est_curve, v_est);
    // Start reference captured once and held for the whole rollout.
    const double l0 = cfg.start_l;
    const double theta0 = cfg.start_theta;

    double s = 0.0;
    auto record = [&]() {
      res.true_postures.push_back(true_posture);
      res.estimated_postures.push_back(est_posture);
      res.gripper_path.push_back(gripper);
      res.s_trace.push_back(s);
      res.elbow_error_trace.push_back(
          (true_posture.elbow - est_posture.elbow).norm());
      const ProgressCurve true_curve =
          build_progress_curve(true_posture, cfg.arc_radius);
      res.clearance_trace.push_back(
          to_dressing(gripper, true_posture, true_curve, v_true).l);
    };
    record();

    for (int t = 0; t < cfg.max_steps; ++t) {
      // (1) Human hand under the stretch controller.
      if (cfg.mode != RolloutMode::StaticArm &&
          elbow_angle(true_posture) <= kStretchStopAngle) {
        const Vec3 dir = optimal_stretch_direction(true_posture);
        desired += kStretchAdvance * dir;
        HumanResponseModel human = cfg.human;
        if (cfg.mode == RolloutMode::Compliant) {
          human.deviation_bias = Vec3::Zero();  // passive follow
        }
        Vec3 jitter = Vec3::Zero();
        if (human.noise_std > 0.0) {
          jitter = human.noise_std * Vec3(noise(rng), noise(rng), noise(rng));
        }
        const Vec3 delta = human_hand_response(
            global_stiffness(dir, cfg.stiffness), cfg.stiffness, human,
            desired, hand, cfg.dt, jitter);
        const Point3 next = project_to_reachable(hand + delta, L);
        truth = step_estimate(truth, next, L, EstimatorWeights::identity());
        hand = forward_kinematics_hand(truth.q_hat, L);
        true_posture = forward_kinematics(truth.q_hat, L);
        v_true = arm_plane_normal(true_posture, v_true);
      }

      // (2) Recursive posture estimation from the measured hand.
      est = step_estimate(est, hand, L, cfg.weights);
      est_posture = forward_kinematics(est.q_hat, L);

      // (3)(4) Progress dynamics and features from the ESTIMATED posture.
      s = step_progress(s, cfg.dynamics);
      const double psi_hat = elbow_angle(est_posture);

      // (5) Next gripper waypoint on the estimated posture's curve.
      v_est = arm_plane_normal(est_posture, v_est);
      est_curve = build_progress_curve(est_posture, cfg.arc_radius);
      gripper = generate_waypoint(*cfg.policy_l, *cfg.policy_theta, s, psi_hat,
                                  l0, theta0, est_posture, est_curve, v_est)
                    .point;

      // (6) Record, then stop once the target progress is reached.
      record();
      if (s >= cfg.dynamics.s_target - 1e-12) break;
    }

    res.outcome = evaluate_success(res, true_posture, cfg.thresholds,
                                   cfg.dynamics.s_target, &res.outcome_detail);
  } catch (const Error& e) {
    res.outcome = Outcome::NoConvergence;
    res.outcome_detail = e.what();
  }
  return res;
}

/// Per-case (max, mean) elbow estimation error in meters: simulates the
/// stretch per config, then replays the resulting hand path through the
/// recursive estimator with the config's weights. Mirrors the stretch
/// evaluation protocol with max error as the headline indicator.
inline std::vector<std::pair<double, double>> evaluate_estimation(
    const std::vector<RolloutConfig>& cases) {
  std::vector<std::pair<double, double>> out;
  out.reserve(cases.size());
  for (const auto& cfg : cases) {
    const std::vector<ArmPosture> truth =
        simulate_stretch(cfg.initial_posture, cfg.limb_lengths, cfg.stiffness,
                         cfg.human, cfg.max_steps, cfg.dt, cfg.seed);
    if (truth.size() < 2) {
      out.emplace_back(0.0, 0.0);
      continue;
    }
    std::vector<Point3> hand_path;
    hand_path.reserve(truth.size());
    for (const auto& p : truth) hand_path.push_back(p.hand);
    const std::vector<ArmPosture> estimated =
        track(cfg.initial_posture, hand_path, cfg.limb_lengths, cfg.weights);

    double max_err = 0.0, sum_err = 0.0;
    for (std::size_t i = 1; i < truth.size(); ++i) {
      const double err = (truth[i].elbow - estimated[i].elbow).norm();
      max_err = std::max(max_err, err);
      sum_err += err;
    }
    out.emplace_back(max_err, sum_err / static_cast<double>(truth.size() - 1));
  }
  return out;
}

}  // namespace dressing
