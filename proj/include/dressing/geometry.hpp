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

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>

#include "dressing/errors.hpp"

namespace dressing {

using Vec3 = Eigen::Vector3d;
using Point3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Jacobian3x4 = Eigen::Matrix<double, 3, 4>;

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

/// Rigid transform x -> R*x + t between two robot base frames.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  /// R must be orthonormal with det +1 within 1e-9.
  void validate() const {
    const double ortho = (rotation.transpose() * rotation - Mat3::Identity())
                             .cwiseAbs()
                             .maxCoeff();
    if (ortho > 1e-9 || std::abs(rotation.determinant() - 1.0) > 1e-9) {
      throw DomainError("rigid transform: rotation is not a proper rotation");
    }
  }
};

inline Point3 transform_point(const RigidTransform& T, const Point3& x) {
  return T.rotation * x + T.translation;
}

/// Shoulder-to-elbow and elbow-to-hand lengths in meters.
struct LimbLengths {
  double upper_arm = 0.0;
  double forearm = 0.0;

  double reach() const { return upper_arm + forearm; }
  void validate() const {
    if (!(upper_arm > 0.0) || !(forearm > 0.0)) {
      throw DomainError("limb lengths must be strictly positive");
    }
  }
};

/// The four angles that move the hand: a spherical shoulder joint
/// (alpha, beta) and a spherical elbow joint (phi, gamma).
///
/// Convention: the shoulder frame has +z up and the arm hangs along -z at
/// q = 0. alpha rotates about +y, beta about +x, phi is elbow flexion
/// (0 = straight, in [0, pi]) and gamma rotates the forearm about the
/// upper-arm axis. With this convention the interior elbow angle is
/// exactly pi - phi.
struct JointAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double phi = 0.0;
  double gamma = 0.0;

  Vec4 vector() const { return Vec4(alpha, beta, phi, gamma); }
  static JointAngles from_vector(const Vec4& v) {
    return JointAngles{v[0], v[1], v[2], v[3]};
  }
  JointAngles wrapped() const {
    return JointAngles{wrap_angle(alpha), wrap_angle(beta), phi,
                       wrap_angle(gamma)};
  }
};

/// Shoulder, elbow and hand positions in the shoulder frame.
struct ArmPosture {
  Point3 shoulder = Point3::Zero();
  Point3 elbow = Point3::Zero();
  Point3 hand = Point3::Zero();
};

namespace detail {

inline Mat3 rot_x(double a) {
  Mat3 m;
  m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return m;
}
inline Mat3 rot_y(double a) {
  Mat3 m;
  m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return m;
}
inline Mat3 rot_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}
// Elementwise derivatives d/da of the rotation matrices above.
inline Mat3 drot_x(double a) {
  Mat3 m;
  m << 0, 0, 0, 0, -std::sin(a), -std::cos(a), 0, std::cos(a), -std::sin(a);
  return m;
}
inline Mat3 drot_y(double a) {
  Mat3 m;
  m << -std::sin(a), 0, std::cos(a), 0, 0, 0, -std::cos(a), 0, -std::sin(a);
  return m;
}
inline Mat3 drot_z(double a) {
  Mat3 m;
  m << -std::sin(a), -std::cos(a), 0, std::cos(a), -std::sin(a), 0, 0, 0, 0;
  return m;
}

inline const Vec3 kDown{0.0, 0.0, -1.0};

}  // namespace detail

/// Hand and elbow positions for joint angles q.
inline ArmPosture forward_kinematics(const JointAngles& q,
                                     const LimbLengths& L) {
  L.validate();
  const Mat3 shoulder_rot = detail::rot_y(q.alpha) * detail::rot_x(q.beta);
  const Vec3 forearm_local =
      detail::rot_z(q.gamma) * detail::rot_x(q.phi) * detail::kDown;
  ArmPosture p;
  p.shoulder = Point3::Zero();
  p.elbow = shoulder_rot * (L.upper_arm * detail::kDown);
  p.hand = p.elbow + shoulder_rot * (L.forearm * forearm_local);
  return p;
}

inline Point3 forward_kinematics_hand(const JointAngles& q,
                                      const LimbLengths& L) {
  return forward_kinematics(q, L).hand;
}

/// Interior angle at the elbow between the upper arm and the forearm,
/// in [0, pi]. pi means a fully straight arm.
inline double elbow_angle(const ArmPosture& p) {
  const Vec3 a = p.shoulder - p.elbow;
  const Vec3 b = p.hand - p.elbow;
  if (a.norm() < 1e-9 || b.norm() < 1e-9) {
    throw DegeneratePosture("elbow coincides with shoulder or hand");
  }
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Recovers joint angles from positions. The inverse of forward_kinematics
/// up to the straight-arm singularity, where gamma is unobservable and is
/// resolved to 0.
inline JointAngles joint_angles_from_posture(const ArmPosture& p,
                                             const LimbLengths& L) {
  L.validate();
  const Vec3 upper = p.elbow - p.shoulder;
  const Vec3 fore = p.hand - p.elbow;
  if (std::abs(upper.norm() - L.upper_arm) > 1e-4 ||
      std::abs(fore.norm() - L.forearm) > 1e-4) {
    throw LengthMismatch("posture segment lengths do not match limb lengths");
  }

  JointAngles q;
  const Vec3 u = upper.normalized();
  q.beta = std::asin(std::clamp(u.y(), -1.0, 1.0));
  const double cos_beta = std::sqrt(std::max(0.0, 1.0 - u.y() * u.y()));
  // Shoulder gimbal (elbow along +-y): alpha unobservable, resolved to 0.
  q.alpha = cos_beta < 1e-12 ? 0.0 : std::atan2(-u.x(), -u.z());

  q.phi = kPi - elbow_angle(p);

  const Mat3 shoulder_rot = detail::rot_y(q.alpha) * detail::rot_x(q.beta);
  const Vec3 f_local = shoulder_rot.transpose() * fore.normalized();
  // f_local = (-sin g * sin phi, cos g * sin phi, -cos phi)
  const double sin_phi = std::hypot(f_local.x(), f_local.y());
  q.gamma = sin_phi < 1e-9 ? 0.0 : std::atan2(-f_local.x(), f_local.y());

  return q.wrapped();
}

/// 3x4 Jacobian of the hand position with respect to (alpha, beta, phi,
/// gamma). Exact analytical partials.
inline Jacobian3x4 jacobian(const JointAngles& q, const LimbLengths& L) {
  const Mat3 A = detail::rot_y(q.alpha);
  const Mat3 B = detail::rot_x(q.beta);
  const Mat3 G = detail::rot_z(q.gamma);
  const Mat3 F = detail::rot_x(q.phi);
  const Vec3 m = detail::kDown;
  const Vec3 w = L.upper_arm * m + L.forearm * (G * F * m);

  Jacobian3x4 J;
  J.col(0) = detail::drot_y(q.alpha) * B * w;
  J.col(1) = A * detail::drot_x(q.beta) * w;
  J.col(2) = A * B * (L.forearm * (G * detail::drot_x(q.phi) * m));
  J.col(3) = A * B * (L.forearm * (detail::drot_z(q.gamma) * F * m));
  return J;
}

/// Default body reference point used to orient the arm-plane normal toward
/// the body side (0.3 m along +y of the shoulder frame).
inline const Point3 kDefaultBodyReference{0.0, 0.3, 0.0};

/// Unit normal of the plane through shoulder, elbow and hand, oriented
/// toward the body side. When the three points are collinear the plane is
/// undefined; `previous` is returned if provided.
inline Vec3 arm_plane_normal(
    const ArmPosture& p, std::optional<Vec3> previous = std::nullopt,
    const Point3& body_reference = kDefaultBodyReference) {
  const Vec3 cross = (p.elbow - p.shoulder).cross(p.hand - p.elbow);
  const double area = 0.5 * cross.norm();
  if (area < 1e-8) {
    if (previous) return *previous;
    throw DegeneratePosture("arm plane undefined: collinear posture");
  }
  Vec3 n = cross.normalized();
  if (n.dot(body_reference - p.elbow) < 0.0) n = -n;
  return n;
}

}  // namespace dressing
