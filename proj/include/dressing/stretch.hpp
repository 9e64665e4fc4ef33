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

#include <random>
#include <vector>

#include "dressing/estimator.hpp"
#include "dressing/geometry.hpp"

namespace dressing {

/// Selective stiffness: k_x acts along the guidance direction only, the
/// two perpendicular directions are fully compliant. Damping is isotropic.
struct StiffnessConfig {
  double k_x = 200.0;
  double damping = 28.284271247461902;  // 2*sqrt(k_x * 1 kg)

  void validate() const {
    if (k_x < 0.0 || damping < 0.0) {
      throw DomainError("stiffness and damping must be non-negative");
    }
  }
};

/// First-order stand-in for the guided human hand: velocity proportional
/// to the applied force, plus an off-axis drift for a non-compliant human
/// and per-step positional noise.
struct HumanResponseModel {
  double compliance_gain = 0.05;  // m/(N*s)
  Vec3 deviation_bias = Vec3::Zero();  // m/s
  double noise_std = 0.0;  // m, per step

  void validate() const {
    if (compliance_gain < 0.0 || noise_std < 0.0) {
      throw DomainError("compliance gain and noise std must be non-negative");
    }
  }
};

/// The hand direction that maximizes the elbow-angle increase: the unit
/// vector from the shoulder through the hand (the move that lengthens the
/// shoulder-hand chord the most).
inline Vec3 optimal_stretch_direction(const ArmPosture& p) {
  const Vec3 d = p.hand - p.shoulder;
  const double n = d.norm();
  if (n < 1e-6) {
    throw DegeneratePosture("hand coincides with the shoulder");
  }
  return d / n;
}

/// Stiffness matrix in global coordinates for a guidance direction d:
/// Gamma^T K_local Gamma collapses to k_x * d d^T for every rotation Gamma
/// whose first row is d^T, so the free roll about d never enters.
inline Mat3 global_stiffness(const Vec3& direction,
                             const StiffnessConfig& cfg) {
  cfg.validate();
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw DomainError("guidance direction must be a unit vector");
  }
  return cfg.k_x * direction * direction.transpose();
}

/// Minimal rotation Gamma aligning the global x-axis with `direction`
/// (first row of Gamma equals direction^T). Only used for logging; the
/// global stiffness is invariant to the roll choice.
inline Mat3 alignment_rotation(const Vec3& direction) {
  return Eigen::Quaterniond::FromTwoVectors(Vec3::UnitX(), direction)
      .toRotationMatrix()
      .transpose();
}

/// PD guidance force with zero desired velocity: K (x_d - x) - D x_dot.
inline Vec3 guidance_force(const Mat3& k_global, const StiffnessConfig& cfg,
                           const Point3& desired, const Point3& current,
                           const Vec3& velocity) {
  return k_global * (desired - current) - cfg.damping * velocity;
}

/// Desired-position advance per control step along the stretch direction.
inline constexpr double kStretchAdvance = 0.002;

/// Elbow angle beyond which the stretch freezes to stay clear of the
/// straight-arm singularity.
inline constexpr double kStretchStopAngle = kPi * 179.0 / 180.0;

/// One implicit hand-response step: solves
///   delta = gain * (K (x_d - x) - D * delta/dt) * dt + bias * dt + noise
/// for delta. Evaluating the damping at the step's own velocity keeps the
/// discrete loop stable for any gain and damping choice.
inline Vec3 human_hand_response(const Mat3& k_global,
                                const StiffnessConfig& cfg,
                                const HumanResponseModel& human,
                                const Point3& desired, const Point3& hand,
                                double dt, const Vec3& noise) {
  const Vec3 spring = human.compliance_gain * (k_global * (desired - hand));
  return (spring * dt + human.deviation_bias * dt + noise) /
         (1.0 + human.compliance_gain * cfg.damping);
}

/// Clamps a hand position into the annulus reachable by the arm.
inline Point3 project_to_reachable(Point3 hand, const LimbLengths& L) {
  const double lo = std::abs(L.upper_arm - L.forearm) * (1.0 + 1e-9);
  const double hi = L.reach() * (1.0 - 1e-9);
  const double n = hand.norm();
  if (n > hi) hand *= hi / n;
  if (n < lo && n > 0.0) hand *= lo / n;
  return hand;
}

/// Closed-loop stretch of a simulated human arm: each step the controller
/// recomputes the optimal direction, advances the desired position, and the
/// hand responds per the human model. The true arm follows the hand with a
/// minimum-norm joint update. Returns steps+1 postures including the start.
/// Deterministic for a fixed seed.
inline std::vector<ArmPosture> simulate_stretch(
    const ArmPosture& start, const LimbLengths& L, const StiffnessConfig& cfg,
    const HumanResponseModel& human, int steps, double dt,
    std::uint64_t seed) {
  cfg.validate();
  human.validate();
  if (!(dt > 0.0)) throw DomainError("dt must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  PostureEstimate truth{joint_angles_from_posture(start, L), 0};
  Point3 hand = forward_kinematics_hand(truth.q_hat, L);
  Point3 desired = hand;

  std::vector<ArmPosture> trace;
  trace.reserve(static_cast<std::size_t>(steps) + 1);
  trace.push_back(forward_kinematics(truth.q_hat, L));

  bool frozen = false;
  for (int t = 0; t < steps; ++t) {
    const ArmPosture current = trace.back();
    if (!frozen && elbow_angle(current) > kStretchStopAngle) frozen = true;
    if (frozen) {
      trace.push_back(current);
      continue;
    }

    const Vec3 dir = optimal_stretch_direction(current);
    desired += kStretchAdvance * dir;
    Vec3 jitter = Vec3::Zero();
    if (human.noise_std > 0.0) {
      jitter = human.noise_std * Vec3(noise(rng), noise(rng), noise(rng));
    }
    const Vec3 delta = human_hand_response(
        global_stiffness(dir, cfg), cfg, human, desired, hand, dt, jitter);

    const Point3 next = project_to_reachable(hand + delta, L);
    truth = step_estimate(truth, next, L, EstimatorWeights::identity());
    hand = forward_kinematics_hand(truth.q_hat, L);
    trace.push_back(forward_kinematics(truth.q_hat, L));
  }
  return trace;
}

}  // namespace dressing
