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

#include <Eigen/SVD>
#include <cstddef>
#include <string>
#include <vector>

#include "dressing/geometry.hpp"

namespace dressing {

/// Diagonal weights of the joint-displacement objective. A larger entry
/// means the corresponding joint is less likely to move.
struct EstimatorWeights {
  Vec4 q_diag = Vec4::Ones();

  void validate() const {
    for (int i = 0; i < 4; ++i) {
      if (!(q_diag[i] > 0.0)) {
        throw DomainError("estimator weights must be strictly positive");
      }
    }
  }
  static EstimatorWeights identity() { return EstimatorWeights{}; }
};

/// Weights fitted from a recorded stretch of a real arm, used for the
/// interactive dressing runs. Shipped as a fixture, not recomputed.
inline const EstimatorWeights kReferenceStretchWeights{
    Vec4{207.89, 654.28, 99.89, 184.65}};

/// Recursive posture estimate in angle representation.
struct PostureEstimate {
  JointAngles q_hat;
  std::size_t step_index = 0;
};

/// Fits the weights from an angle trajectory as the reciprocals of the
/// summed squared adjacent differences per joint.
///
/// A joint that never moves makes its sum zero; by default that raises
/// DegenerateTrajectory, with `regularized` each sum gets +1e-8 instead.
inline EstimatorWeights compute_weights(
    const std::vector<JointAngles>& trajectory, bool regularized = false) {
  if (trajectory.size() < 2) {
    throw DegenerateTrajectory("angle trajectory needs at least two samples");
  }
  Vec4 sums = Vec4::Zero();
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const Vec4 d = trajectory[i].vector() - trajectory[i - 1].vector();
    for (int j = 0; j < 4; ++j) {
      const double dj = wrap_angle(d[j]);
      sums[j] += dj * dj;
    }
  }
  if (regularized) {
    sums.array() += 1e-8;
  } else if ((sums.array() == 0.0).any()) {
    throw DegenerateTrajectory("a joint never moves in the trajectory");
  }
  return EstimatorWeights{sums.cwiseInverse()};
}

namespace detail {

struct JacobianDecomposition {
  Eigen::JacobiSVD<Jacobian3x4> svd;
  explicit JacobianDecomposition(const Jacobian3x4& J)
      : svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV) {}

  int rank(double tol = 1e-10) const {
    return (svd.singularValues().array() > tol).count();
  }

  /// Moore-Penrose inverse, singular values below 1e-10 treated as zero.
  Eigen::Matrix<double, 4, 3> pseudo_inverse() const {
    Eigen::Matrix<double, 4, 3> pinv = Eigen::Matrix<double, 4, 3>::Zero();
    const auto& s = svd.singularValues();
    for (int i = 0; i < 3; ++i) {
      if (s[i] > 1e-10) {
        pinv += (1.0 / s[i]) * svd.matrixV().col(i) *
                svd.matrixU().col(i).transpose();
      }
    }
    return pinv;
  }

  /// Damped inverse used near the straight-arm singularity.
  Eigen::Matrix<double, 4, 3> damped_inverse(double damping = 1e-6) const {
    Eigen::Matrix<double, 4, 3> pinv = Eigen::Matrix<double, 4, 3>::Zero();
    const auto& s = svd.singularValues();
    for (int i = 0; i < 3; ++i) {
      pinv += (s[i] / (s[i] * s[i] + damping * damping)) *
              svd.matrixV().col(i) * svd.matrixU().col(i).transpose();
    }
    return pinv;
  }

  /// Unit null-space vector, sign fixed so its first nonzero component is
  /// positive.
  Vec4 null_vector() const {
    Vec4 mu = svd.matrixV().col(3);
    for (int i = 0; i < 4; ++i) {
      if (std::abs(mu[i]) > 1e-12) {
        if (mu[i] < 0.0) mu = -mu;
        break;
      }
    }
    return mu;
  }
};

}  // namespace detail

inline Eigen::Matrix<double, 4, 3> pseudo_inverse(const Jacobian3x4& J) {
  return detail::JacobianDecomposition(J).pseudo_inverse();
}

inline Vec4 null_space_vector(const Jacobian3x4& J) {
  return detail::JacobianDecomposition(J).null_vector();
}

/// Analytical solution of
///   min  dq^T Q dq   s.t.  J(q) dq = delta_hand:
///   dq* = J+ dp - (mu^T Q dq_h / mu^T Q mu) mu.
/// The first term satisfies the constraint, the second moves along the
/// null space to minimize the weighted displacement.
inline Vec4 solve_delta_q(const JointAngles& q, const Vec3& delta_hand,
                          const EstimatorWeights& weights,
                          const LimbLengths& L) {
  weights.validate();
  const detail::JacobianDecomposition dec(jacobian(q, L));
  if (dec.rank() < 3) {
    throw SingularJacobian("jacobian rank below 3: null space is not 1-D");
  }
  const Vec4 dq_h = dec.pseudo_inverse() * delta_hand;
  const Vec4 mu = dec.null_vector();
  const Vec4 q_mu = weights.q_diag.cwiseProduct(mu);
  const double gain = -mu.dot(weights.q_diag.cwiseProduct(dq_h)) / mu.dot(q_mu);
  return dq_h + gain * mu;
}

/// Maximum hand displacement solved in one linearized step; larger inputs
/// are split into sub-steps.
inline constexpr double kStepCap = 0.005;

/// Elbow flexion below which the damped pseudoinverse replaces the
/// weighted solve (straight-arm singularity).
inline constexpr double kSingularPhi = 1e-3;

/// One recursive update: solves for the joint increment that moves the
/// estimated hand to `hand_now`, sub-stepping so every linearized solve
/// stays below the step cap. The returned estimate places the hand at
/// `hand_now` within 1e-6 m.
inline PostureEstimate step_estimate(const PostureEstimate& prev,
                                     const Point3& hand_now,
                                     const LimbLengths& L,
                                     const EstimatorWeights& weights) {
  if (!hand_now.allFinite()) {
    throw DomainError("hand position is not finite");
  }
  if (hand_now.norm() > L.reach()) {
    throw UnreachableHand("hand target outside the reachable sphere");
  }

  JointAngles q = prev.q_hat;
  constexpr int kMaxIterations = 512;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Vec3 residual = hand_now - forward_kinematics_hand(q, L);
    const double dist = residual.norm();
    if (dist < 1e-10) break;
    const Vec3 step = dist > kStepCap ? (kStepCap / dist) * residual
                                      : Vec3(residual);
    Vec4 dq;
    if (std::abs(q.phi) < kSingularPhi) {
      dq = detail::JacobianDecomposition(jacobian(q, L)).damped_inverse() *
           step;
    } else {
      dq = solve_delta_q(q, step, weights, L);
    }
    q = JointAngles::from_vector(q.vector() + dq);
    q.phi = std::clamp(q.phi, 0.0, kPi);
    q = q.wrapped();
    if (it == kMaxIterations - 1 &&
        (hand_now - forward_kinematics_hand(q, L)).norm() > 1e-6) {
      throw ConvergenceFailure("estimator update did not converge");
    }
  }
  return PostureEstimate{q, prev.step_index + 1};
}

/// Tracks a hand path from a known initial posture; returns one posture
/// per input point. Only the initial posture is known, everything after
/// is recursive estimation.
inline std::vector<ArmPosture> track(const ArmPosture& initial,
                                     const std::vector<Point3>& hand_path,
                                     const LimbLengths& L,
                                     const EstimatorWeights& weights) {
  if (hand_path.empty()) return {};
  if ((hand_path.front() - initial.hand).norm() > kStepCap) {
    throw PathStartMismatch(
        "hand path does not start at the initial posture's hand");
  }
  PostureEstimate est{joint_angles_from_posture(initial, L), 0};
  std::vector<ArmPosture> out;
  out.reserve(hand_path.size());
  for (std::size_t i = 0; i < hand_path.size(); ++i) {
    try {
      est = step_estimate(est, hand_path[i], L, weights);
    } catch (const UnreachableHand&) {
      throw UnreachableHand("hand target at row " + std::to_string(i) +
                            " outside the reachable sphere");
    }
    out.push_back(forward_kinematics(est.q_hat, L));
  }
  return out;
}

/// Maps the interactive robot's end-effector position into the dressing
/// robot frame via the calibration transform; the held hand is taken to be
/// at the end effector.
inline Point3 hand_in_dressing_frame(const Point3& end_effector,
                                     const RigidTransform& T) {
  return transform_point(T, end_effector);
}

}  // namespace dressing
