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

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "dressing/synthetic.hpp"

using namespace dressing;

namespace {

DemonstrationRecord demo_with_path(const ArmPosture& posture,
                                   std::vector<Point3> path) {
  DemonstrationRecord demo;
  demo.posture = posture;
  demo.gripper_path = std::move(path);
  for (std::size_t i = 0; i < demo.gripper_path.size(); ++i) {
    demo.timestamps.push_back(0.1 * i);
  }
  return demo;
}

}  // namespace

TEST_CASE("progress dynamics basics") {
  const ProgressDynamics dyn{0.05, 1.0};
  CHECK(step_progress(0.90, dyn) == Catch::Approx(0.95).margin(1e-15));
  CHECK(step_progress(0.98, dyn) == Catch::Approx(1.00).margin(1e-15));
  CHECK(step_progress(1.0, dyn) == 1.0);
}

TEST_CASE("progress reaches the target in exactly ceil((target-s0)/c) steps") {
  for (double c : {0.01, 0.03, 0.07, 0.25}) {
    for (double s0 : {0.0, 0.1, 0.33, 0.5, 0.91}) {
      for (double target : {0.8, 1.0}) {
        if (s0 >= target) continue;
        const ProgressDynamics dyn{c, target};
        // Guard the ratio against binary representation spill (0.9/0.03
        // evaluates to 30.000000000000004).
        const int expected =
            static_cast<int>(std::ceil((target - s0) / c - 1e-9));
        double s = s0;
        int steps = 0;
        while (s < target - 1e-15) {
          s = step_progress(s, dyn);
          ++steps;
        }
        CHECK(steps == expected);
        CHECK(s == target);  // fixed point, exact
        CHECK(step_progress(s, dyn) == target);
      }
    }
  }
}

TEST_CASE("a path resting at the start has zero deltas") {
  const ArmPosture posture =
      make_demo_posture(100.0 * kPi / 180.0, kMannequinArm);
  const ProgressCurve curve = build_progress_curve(posture, 0.05);
  const Vec3 v = arm_plane_normal(posture);
  const Point3 start = from_dressing({0.0, 0.08, 0.3}, posture, curve, v);
  const auto t = transform_demo(demo_with_path(posture, {start, start, start}),
                                0.05);
  CHECK(t.l0 == Catch::Approx(0.08).margin(1e-9));
  for (const auto& s : t.samples) {
    CHECK(s.delta_l == Catch::Approx(0.0).margin(1e-9));
    CHECK(s.delta_theta == Catch::Approx(0.0).margin(1e-9));
    CHECK(s.psi == Catch::Approx(elbow_angle(posture)));
  }
}

TEST_CASE("a demo riding the progress curve keeps delta_l at minus l0") {
  const ArmPosture posture =
      make_demo_posture(110.0 * kPi / 180.0, kMannequinArm);
  const ProgressCurve curve = build_progress_curve(posture, 0.05);
  const Vec3 v = arm_plane_normal(posture);
  std::vector<Point3> path;
  for (int i = 0; i <= 20; ++i) {
    path.push_back(from_dressing({i / 20.0, 0.0, 0.0}, posture, curve, v));
  }
  const auto t = transform_demo(demo_with_path(posture, path), 0.05);
  CHECK(t.l0 == Catch::Approx(0.0).margin(1e-9));
  for (const auto& s : t.samples) {
    CHECK(s.delta_l == Catch::Approx(-t.l0).margin(1e-9));
  }
}

TEST_CASE("outer-strategy demos swing theta past half a radian") {
  const ArmPosture posture = make_demo_posture(80.0 * kPi / 180.0,
                                               kMannequinArm);
  const DemonstrationRecord demo = synth_demo(posture, 0.05, 5);
  const auto t = transform_demo(demo, 0.05);
  double max_dtheta = 0.0;
  for (const auto& s : t.samples) {
    max_dtheta = std::max(max_dtheta, std::abs(s.delta_theta));
  }
  CHECK(max_dtheta > 0.5);
}

TEST_CASE("theta unwrapping tracks a seam-crossing path") {
  const ArmPosture posture =
      make_demo_posture(120.0 * kPi / 180.0, kMannequinArm);
  const ProgressCurve curve = build_progress_curve(posture, 0.05);
  const Vec3 v = arm_plane_normal(posture);
  // theta runs from 0.2 down through 0 and wraps past 2*pi.
  std::vector<Point3> path;
  const int n = 40;
  for (int i = 0; i <= n; ++i) {
    const double theta = 0.2 - 1.5 * i / n;  // ends at -1.3 ~ 4.98 rad
    path.push_back(
        from_dressing({0.3 + 0.2 * i / n, 0.07, theta}, posture, curve, v));
  }
  const auto t = transform_demo(demo_with_path(posture, path), 0.05);
  for (std::size_t i = 1; i < t.samples.size(); ++i) {
    const double jump =
        std::abs(t.samples[i].delta_theta - t.samples[i - 1].delta_theta);
    CHECK(jump < 0.2);  // smooth, no 2*pi flips
  }
  CHECK(t.samples.back().delta_theta == Catch::Approx(-1.5).margin(1e-9));
}

TEST_CASE("demo transform inverts exactly") {
  const ArmPosture posture =
      make_demo_posture(95.0 * kPi / 180.0, kMannequinArm);
  const DemonstrationRecord demo = synth_demo(posture, 0.05, 9);
  const auto t = transform_demo(demo, 0.05);
  const auto path =
      invert_demo_transform(t.samples, t.l0, t.theta0, posture, 0.05);
  REQUIRE(path.size() == demo.gripper_path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK((path[i] - demo.gripper_path[i]).norm() < 1e-9);
  }
}

TEST_CASE("demo validation") {
  DemonstrationRecord demo;
  demo.posture = make_demo_posture(2.0, kMannequinArm);
  demo.gripper_path = {Point3(0, 0, 0)};
  demo.timestamps = {0.0};
  CHECK_THROWS_AS(demo.validate(), DomainError);  // too short
  demo.gripper_path.push_back(Point3(0, 0, 0.1));
  demo.timestamps.push_back(0.0);  // not increasing
  CHECK_THROWS_AS(demo.validate(), DomainError);
}

TEST_CASE("corpus-trained policy reproduces the start point at s = 0") {
  const double r = 0.05;
  const auto demos = make_demo_corpus(kMannequinArm, r, 1234);
  const TrainedPolicy policy = train_policy(demos, r, 8, 99);

  const ArmPosture posture =
      make_demo_posture(131.13 * kPi / 180.0, kMannequinArm);
  const ProgressCurve curve = build_progress_curve(posture, r);
  const Vec3 v = arm_plane_normal(posture);
  const double l0 = 0.08, theta0 = 0.0;
  const Waypoint wp =
      generate_waypoint(policy.delta_l, policy.delta_theta, 0.0,
                        elbow_angle(posture), l0, theta0, posture, curve, v);
  const Point3 start = from_dressing({0.0, l0, theta0}, posture, curve, v);
  CHECK((wp.point - start).norm() < 1e-3);
  CHECK_FALSE(wp.extrapolated);
  CHECK_FALSE(wp.radius_clamped);
}

TEST_CASE("flat training data encodes a constant offset policy") {
  // delta_l = 0.02 and delta_theta = 0 everywhere.
  std::mt19937_64 rng(141);
  std::uniform_real_distribution<double> us(0.0, 1.0);
  std::uniform_real_distribution<double> upsi(1.4, 2.8);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 400; ++i) {
    samples.push_back({us(rng), upsi(rng), 0.02, 0.0});
  }
  const GaussianMixture gmm_l = train_policy_mixture(samples, false, 2, 3);
  const GaussianMixture gmm_theta = train_policy_mixture(samples, true, 2, 4);

  const ArmPosture posture =
      make_demo_posture(110.0 * kPi / 180.0, kMannequinArm);
  const ProgressCurve curve = build_progress_curve(posture, 0.05);
  const Vec3 v = arm_plane_normal(posture);
  const double l0 = 0.08;
  for (double s : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const Waypoint wp =
        generate_waypoint(gmm_l, gmm_theta, s, elbow_angle(posture), l0, 0.0,
                          posture, curve, v);
    const Point3 on_curve = curve_sample(curve, s * curve.total_length).point;
    CHECK(std::abs((wp.point - on_curve).norm() - (l0 + 0.02)) < 1e-3);
  }
}

TEST_CASE("negative target radius clamps onto the curve") {
  std::mt19937_64 rng(143);
  std::uniform_real_distribution<double> us(0.0, 1.0);
  std::uniform_real_distribution<double> upsi(1.4, 2.8);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 400; ++i) {
    samples.push_back({us(rng), upsi(rng), -0.05, 0.0});  // dives below zero
  }
  const GaussianMixture gmm_l = train_policy_mixture(samples, false, 1, 3);
  const GaussianMixture gmm_theta = train_policy_mixture(samples, true, 1, 4);

  const ArmPosture posture =
      make_demo_posture(110.0 * kPi / 180.0, kMannequinArm);
  const ProgressCurve curve = build_progress_curve(posture, 0.05);
  const Vec3 v = arm_plane_normal(posture);
  const Waypoint wp = generate_waypoint(gmm_l, gmm_theta, 0.4,
                                        elbow_angle(posture), 0.03, 0.0,
                                        posture, curve, v);
  CHECK(wp.radius_clamped);
  const Point3 on_curve = curve_sample(curve, 0.4 * curve.total_length).point;
  CHECK((wp.point - on_curve).norm() < 1e-9);
}

TEST_CASE("queries outside the training hull are flagged") {
  const double r = 0.05;
  const auto demos = make_demo_corpus(kMannequinArm, r, 1234);
  const TrainedPolicy policy = train_policy(demos, r, 8, 99);
  const ArmPosture posture =
      make_demo_posture(100.0 * kPi / 180.0, kMannequinArm);
  const ProgressCurve curve = build_progress_curve(posture, r);
  const Vec3 v = arm_plane_normal(posture);
  // 40 degrees is far outside the demonstrated elbow angles.
  const Waypoint wp =
      generate_waypoint(policy.delta_l, policy.delta_theta, 0.5,
                        40.0 * kPi / 180.0, 0.08, 0.0, posture, curve, v);
  CHECK(wp.extrapolated);
}

TEST_CASE("smaller elbow angles show larger theta changes") {
  const double r = 0.05;
  const auto demos = make_demo_corpus(kMannequinArm, r, 1234);
  const TrainedPolicy policy = train_policy(demos, r, 8, 99);

  VectorXd at80(2), at150(2);
  at80 << 0.5, 80.0 * kPi / 180.0;
  at150 << 0.5, 150.0 * kPi / 180.0;
  const double dtheta_80 =
      std::abs(gmr_condition(policy.delta_theta, at80).mean[0]);
  const double dtheta_150 =
      std::abs(gmr_condition(policy.delta_theta, at150).mean[0]);
  CHECK(dtheta_80 > dtheta_150);
}

TEST_CASE("synthetic demos reproduce the strategy sign pattern") {
  const double r = 0.05;
  std::uint64_t seed = 400;
  for (double deg : {80.47, 87.49, 106.07}) {
    const ArmPosture posture =
        make_demo_posture(deg * kPi / 180.0, kMannequinArm);
    const DemonstrationRecord demo = synth_demo(posture, r, ++seed);
    const ProgressCurve curve = build_progress_curve(posture, r);
    const auto c = classify_strategy(demo.gripper_path, posture, curve);
    CHECK(c.label == StrategyLabel::Outer);
    CHECK(c.signed_distance < -0.06);
    CHECK(c.signed_distance > -0.13);
  }
  for (double deg : {143.46, 149.30}) {
    const ArmPosture posture =
        make_demo_posture(deg * kPi / 180.0, kMannequinArm);
    const DemonstrationRecord demo = synth_demo(posture, r, ++seed);
    const ProgressCurve curve = build_progress_curve(posture, r);
    const auto c = classify_strategy(demo.gripper_path, posture, curve);
    CHECK(c.label == StrategyLabel::Inner);
    CHECK(c.signed_distance > 0.06);
    CHECK(c.signed_distance < 0.15);
  }
}
