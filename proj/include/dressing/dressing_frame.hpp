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

#include <algorithm>
#include <vector>

#include "dressing/geometry.hpp"

namespace dressing {

/// Which piece of the progress curve a point projects onto.
enum class Segment { Forearm, Elbow, Upperarm };

/// Arm-relative coordinate of a point near the arm: progress s in [0, 1]
/// (0 at the hand, 1 at the shoulder), radial distance l to the progress
/// curve, and angle theta around the curve measured from the body-side
/// plane normal.
struct DressingCoord {
  double s = 0.0;
  double l = 0.0;
  double theta = 0.0;
};

/// The spine of the dressing coordinate: a forearm segment, a circular
/// elbow arc of radius `radius` tangent to both limb lines (the tube
/// center-line of a horn torus around the elbow), and an upper-arm
/// segment. Degenerates to the two collinear segments when the arm is
/// straight.
struct ProgressCurve {
  Point3 hand, elbow, shoulder;
  double radius = 0.0;
  Point3 forearm_transition;   // p_he, on the segment hand->elbow
  Point3 upperarm_transition;  // p_es, on the segment elbow->shoulder
  double forearm_run = 0.0;    // |d1|, hand to p_he
  double upperarm_run = 0.0;   // |d2|, shoulder to p_es
  Point3 arc_center;
  double arc_sweep = 0.0;      // radians, pi - elbow angle
  Vec3 arc_axis = Vec3::Zero();  // rotation axis p_he -> p_es, unit
  Vec3 forearm_dir;            // unit hand -> elbow
  Vec3 upperarm_dir;           // unit elbow -> shoulder (travel direction)
  double total_length = 0.0;
  bool degenerate = false;     // straight-arm fallback, no arc
};

namespace detail {

inline Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis) * v;
}

}  // namespace detail

/// Builds the progress curve for a posture. The arc is tangent to both
/// limb lines at distance radius*tan((pi - psi)/2) from the elbow, which
/// keeps the transition points on their limbs and makes the curve C1.
inline ProgressCurve build_progress_curve(const ArmPosture& p, double radius) {
  if (!(radius > 0.0)) throw DomainError("arc radius must be positive");
  const Vec3 fore = p.hand - p.elbow;
  const Vec3 upper = p.shoulder - p.elbow;
  const double len_fore = fore.norm();
  const double len_upper = upper.norm();
  if (len_fore < 1e-9 || len_upper < 1e-9) {
    throw DegeneratePosture("elbow coincides with shoulder or hand");
  }
  if (radius >= std::min(len_fore, len_upper)) {
    throw ArcTooLarge("arc radius exceeds a limb length");
  }

  ProgressCurve c;
  c.hand = p.hand;
  c.elbow = p.elbow;
  c.shoulder = p.shoulder;
  c.radius = radius;
  c.forearm_dir = -fore.normalized();
  c.upperarm_dir = upper.normalized();

  const double psi = elbow_angle(p);
  if (psi >= kPi - 1e-3) {
    // Straight arm: two collinear segments, no arc.
    c.degenerate = true;
    c.forearm_transition = p.elbow;
    c.upperarm_transition = p.elbow;
    c.forearm_run = len_fore;
    c.upperarm_run = len_upper;
    c.arc_center = p.elbow;
    c.arc_sweep = 0.0;
    c.total_length = len_fore + len_upper;
    return c;
  }

  const Vec3 to_hand = fore / len_fore;
  const Vec3 to_shoulder = upper / len_upper;
  const double offset = radius * std::tan((kPi - psi) / 2.0);
  if (offset >= std::min(len_fore, len_upper)) {
    throw ArcTooLarge("arc tangent points fall outside the limbs");
  }

  c.forearm_transition = p.elbow + offset * to_hand;
  c.upperarm_transition = p.elbow + offset * to_shoulder;
  c.forearm_run = len_fore - offset;
  c.upperarm_run = len_upper - offset;
  c.arc_sweep = kPi - psi;

  const Vec3 bisector = (to_hand + to_shoulder).normalized();
  c.arc_center = p.elbow + (radius / std::sin(psi / 2.0)) * bisector;

  // Short-way rotation axis from the forearm tangent point to the
  // upper-arm one; the short arc is the one bisected by the elbow side.
  const Vec3 u0 = (c.forearm_transition - c.arc_center).normalized();
  const Vec3 u1 = (c.upperarm_transition - c.arc_center).normalized();
  c.arc_axis = u0.cross(u1).normalized();

  c.total_length = c.forearm_run + c.arc_sweep * radius + c.upperarm_run;
  return c;
}

/// Projects x onto the arm plane: x_arm = x + v (p_h . v - x . v) / |v|^2.
inline Point3 project_to_arm_plane(const Point3& x, const ArmPosture& p) {
  const Vec3 v = arm_plane_normal(p);
  return x + v * (p.hand.dot(v) - x.dot(v));
}

namespace detail {

inline double forearm_coordinate(const Point3& x_arm, const ProgressCurve& c) {
  return (x_arm - c.hand).dot(c.forearm_dir);
}
inline double upperarm_coordinate(const Point3& x_arm,
                                  const ProgressCurve& c) {
  return (x_arm - c.shoulder).dot(-c.upperarm_dir);
}

}  // namespace detail

/// Segment rule: forearm if its projected run is short of |d1| while the
/// upper-arm run is past |d2|, symmetrically for the upper arm, elbow
/// otherwise.
inline Segment classify_segment(const Point3& x_arm, const ProgressCurve& c) {
  const double d_fore = detail::forearm_coordinate(x_arm, c);
  const double d_upper = detail::upperarm_coordinate(x_arm, c);
  if (d_fore < c.forearm_run && d_upper > c.upperarm_run) {
    return Segment::Forearm;
  }
  if (d_upper < c.upperarm_run && d_fore > c.forearm_run) {
    return Segment::Upperarm;
  }
  return Segment::Elbow;
}

/// Point and travel tangent at a given arclength from the hand.
struct CurveSample {
  Point3 point;
  Vec3 tangent;  // unit, oriented hand -> shoulder
};

inline CurveSample curve_sample(const ProgressCurve& c, double arclength) {
  arclength = std::clamp(arclength, 0.0, c.total_length);
  if (arclength <= c.forearm_run) {
    return {c.hand + arclength * c.forearm_dir, c.forearm_dir};
  }
  const double arc_len = c.arc_sweep * c.radius;
  if (!c.degenerate && arclength <= c.forearm_run + arc_len) {
    const double omega = (arclength - c.forearm_run) / c.radius;
    const Vec3 u0 = (c.forearm_transition - c.arc_center).normalized();
    const Vec3 u = detail::rotate_about(u0, c.arc_axis, omega);
    return {c.arc_center + c.radius * u, c.arc_axis.cross(u)};
  }
  const double from_shoulder =
      std::max(0.0, c.total_length - arclength);
  return {c.shoulder - from_shoulder * c.upperarm_dir, c.upperarm_dir};
}

namespace detail {

struct CurveFoot {
  Point3 point;
  Vec3 tangent;
  double arclength;
  Segment segment;
};

/// Nearest point on the progress curve for an in-plane point, following
/// the segment rule. Points behind the hand clamp to the hand, points past
/// the shoulder clamp to the shoulder.
inline CurveFoot project_to_curve(const Point3& x_arm,
                                  const ProgressCurve& c) {
  const Segment seg = classify_segment(x_arm, c);
  switch (seg) {
    case Segment::Forearm: {
      const double t =
          std::clamp(forearm_coordinate(x_arm, c), 0.0, c.forearm_run);
      return {c.hand + t * c.forearm_dir, c.forearm_dir, t, seg};
    }
    case Segment::Upperarm: {
      const double t =
          std::clamp(upperarm_coordinate(x_arm, c), 0.0, c.upperarm_run);
      return {c.shoulder - t * c.upperarm_dir, c.upperarm_dir,
              c.total_length - t, seg};
    }
    case Segment::Elbow:
    default: {
      if (c.degenerate) {
        return {c.elbow, c.forearm_dir, c.forearm_run, seg};
      }
      const Vec3 radial = x_arm - c.arc_center;
      if (radial.norm() < 1e-9) {
        throw AmbiguousProjection("point coincides with the elbow arc center");
      }
      const Vec3 u = radial.normalized();
      const Vec3 u0 = (c.forearm_transition - c.arc_center).normalized();
      const double raw =
          std::atan2(u0.cross(u).dot(c.arc_axis), u0.dot(u));
      const double omega = std::clamp(raw, 0.0, c.arc_sweep);
      const Vec3 u_omega = detail::rotate_about(u0, c.arc_axis, omega);
      return {c.arc_center + c.radius * u_omega, c.arc_axis.cross(u_omega),
              c.forearm_run + omega * c.radius, seg};
    }
  }
}

}  // namespace detail

/// Converts a Cartesian point to the dressing coordinate (s, l, theta).
/// theta is measured counterclockwise about the travel tangent starting
/// from the body-side normal v, in [0, 2 pi).
inline DressingCoord to_dressing(const Point3& x, const ArmPosture& p,
                                 const ProgressCurve& curve, const Vec3& v) {
  const Point3 x_arm = x + v * (p.hand.dot(v) - x.dot(v));
  const detail::CurveFoot foot = detail::project_to_curve(x_arm, curve);

  DressingCoord dc;
  dc.s = foot.arclength / curve.total_length;
  const Vec3 rho = x - foot.point;
  dc.l = rho.norm();
  if (dc.l < 1e-12) {
    dc.theta = 0.0;
    return dc;
  }
  const Vec3 e2 = foot.tangent.cross(v);
  dc.theta = std::atan2(rho.dot(e2), rho.dot(v));
  if (dc.theta < 0.0) dc.theta += 2.0 * kPi;
  return dc;
}

/// Places a dressing coordinate back into Cartesian space: the exact
/// inverse of to_dressing away from the arc-center singularity.
inline Point3 from_dressing(const DressingCoord& dc, const ArmPosture&,
                            const ProgressCurve& curve, const Vec3& v) {
  if (dc.s < -1e-12 || dc.s > 1.0 + 1e-12) {
    throw OutOfRange("progress scalar outside [0, 1]");
  }
  if (dc.l < 0.0) throw OutOfRange("radial distance must be non-negative");
  const CurveSample at = curve_sample(curve, dc.s * curve.total_length);
  const Vec3 e2 = at.tangent.cross(v);
  return at.point + dc.l * (std::cos(dc.theta) * v + std::sin(dc.theta) * e2);
}

enum class StrategyLabel { Inner, Outer };

struct StrategyClassification {
  StrategyLabel label;
  double signed_distance;  // positive on the inner side of the arm plane
  Point3 transition_point;
};

/// Classifies a dressing path as inner or outer from the in-plane position
/// of its transition point: the path sample whose progress is nearest the
/// middle of the elbow arc. Positive distance = inner arm area.
inline StrategyClassification classify_strategy(
    const std::vector<Point3>& path, const ArmPosture& p,
    const ProgressCurve& curve) {
  if (path.empty()) throw PathDoesNotCrossElbow("empty path");
  if (curve.degenerate) {
    throw DegeneratePosture(
        "straight arm: inner and outer areas are indistinguishable");
  }
  const Vec3 v = arm_plane_normal(p);

  double s_min = 2.0, s_max = -1.0;
  std::vector<double> progress(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    progress[i] = to_dressing(path[i], p, curve, v).s;
    s_min = std::min(s_min, progress[i]);
    s_max = std::max(s_max, progress[i]);
  }
  if (!(s_min < 0.3 && s_max > 0.7)) {
    throw PathDoesNotCrossElbow("path does not span the elbow region");
  }

  const double s_mid =
      (curve.forearm_run + 0.5 * curve.arc_sweep * curve.radius) /
      curve.total_length;
  std::size_t best = 0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (std::abs(progress[i] - s_mid) < std::abs(progress[best] - s_mid)) {
      best = i;
    }
  }

  const Point3 x_arm =
      path[best] + v * (p.hand.dot(v) - path[best].dot(v));
  const Vec3 bisector = ((p.hand - p.elbow).normalized() +
                         (p.shoulder - p.elbow).normalized())
                            .normalized();
  const double dist = (x_arm - p.elbow).norm();
  const bool inner = (x_arm - p.elbow).dot(bisector) > 0.0;
  return {inner ? StrategyLabel::Inner : StrategyLabel::Outer,
          inner ? dist : -dist, path[best]};
}

}  // namespace dressing
