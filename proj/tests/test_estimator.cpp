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

#include "dressing/estimator.hpp"
#include "test_support.hpp"

using namespace dressing;
using test_support::random_valid_angles;
using test_support::test_arm;

namespace {

/// Golden-section search for the null-space gain minimizing the weighted
/// objective; the independent oracle for the closed-form solution.
double brute_force_gain(const Vec4& dq_h, const Vec4& mu, const Vec4& q_diag,
                        double lo = -10.0, double hi = 10.0) {
  auto objective = [&](double lambda) {
    const Vec4 dq = dq_h + lambda * mu;
    return dq.dot(q_diag.cwiseProduct(dq));
  };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (objective(c) < objective(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - ratio * (b - a);
    d = a + ratio * (b - a);
  }
  return 0.5 * (a + b);
}

EstimatorWeights random_weights(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 10.0);
  return EstimatorWeights{Vec4(u(rng), u(rng), u(rng), u(rng))};
}

Vec3 random_small_step(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 d(u(rng), u(rng), u(rng));
  std::uniform_real_distribution<double> mag(1e-4, kStepCap);
  return mag(rng) * d.normalized();
}

}  // namespace

TEST_CASE("weight computation from a single-step trajectory") {
  std::vector<JointAngles> traj{JointAngles{0, 0, 0.5, 0},
                                JointAngles{0.1, 0.05, 0.7, 0.08}};
  const EstimatorWeights w = compute_weights(traj);
  CHECK(w.q_diag[0] == Catch::Approx(100.0).epsilon(1e-12));
  CHECK(w.q_diag[1] == Catch::Approx(400.0).epsilon(1e-12));
  CHECK(w.q_diag[2] == Catch::Approx(25.0).epsilon(1e-12));
  CHECK(w.q_diag[3] == Catch::Approx(156.25).epsilon(1e-12));
}

TEST_CASE("reference stretch weights fixture") {
  CHECK(kReferenceStretchWeights.q_diag[0] == 207.89);
  CHECK(kReferenceStretchWeights.q_diag[1] == 654.28);
  CHECK(kReferenceStretchWeights.q_diag[2] == 99.89);
  CHECK(kReferenceStretchWeights.q_diag[3] == 184.65);
  kReferenceStretchWeights.validate();
}

TEST_CASE("weight computation rejects a joint that never moves") {
  std::vector<JointAngles> constant(5, JointAngles{0.2, 0.1, 0.5, 0.0});
  CHECK_THROWS_AS(compute_weights(constant), DegenerateTrajectory);

  // Regularized mode returns finite weights instead.
  const EstimatorWeights w = compute_weights(constant, true);
  w.validate();
  CHECK(w.q_diag[0] == Catch::Approx(1e8));

  std::vector<JointAngles> one{JointAngles{0, 0, 0.5, 0}};
  CHECK_THROWS_AS(compute_weights(one), DegenerateTrajectory);
}

TEST_CASE("zero hand displacement yields zero joint displacement") {
  const LimbLengths L = test_arm();
  const Vec4 dq = solve_delta_q(JointAngles{0.2, -0.3, 1.0, 0.4},
                                Vec3::Zero(), kReferenceStretchWeights, L);
  CHECK(dq.norm() < 1e-15);
}

TEST_CASE("identity weights reduce to the pseudoinverse solution") {
  const LimbLengths L = test_arm();
  std::mt19937_64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    const JointAngles q = random_valid_angles(rng);
    const Vec3 dp = random_small_step(rng);
    const Vec4 dq = solve_delta_q(q, dp, EstimatorWeights::identity(), L);
    const Vec4 pinv_dq = pseudo_inverse(jacobian(q, L)) * dp;
    CHECK((dq - pinv_dq).norm() < 1e-9);
  }
}

TEST_CASE("closed form matches the brute-force gain search") {
  const LimbLengths L = test_arm();
  std::mt19937_64 rng(37);
  for (int i = 0; i < 1000; ++i) {
    const JointAngles q = random_valid_angles(rng);
    const Vec3 dp = random_small_step(rng);
    const EstimatorWeights w = random_weights(rng);
    const Vec4 dq = solve_delta_q(q, dp, w, L);

    const Jacobian3x4 J = jacobian(q, L);
    const Vec4 dq_h = pseudo_inverse(J) * dp;
    const Vec4 mu = null_space_vector(J);
    const double lambda = brute_force_gain(dq_h, mu, w.q_diag);
    const Vec4 brute = dq_h + lambda * mu;

    const double obj_closed = dq.dot(w.q_diag.cwiseProduct(dq));
    const double obj_brute = brute.dot(w.q_diag.cwiseProduct(brute));
    CHECK(std::abs(obj_closed - obj_brute) < 1e-6);
    CHECK(obj_closed <= obj_brute + 1e-12);

    // Hard constraint: the step reproduces the commanded hand displacement.
    CHECK((J * dq - dp).norm() < 1e-9);
  }
}

TEST_CASE("closed form beats random feasible solutions") {
  const LimbLengths L = test_arm();
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> lam(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const JointAngles q = random_valid_angles(rng);
    const Vec3 dp = random_small_step(rng);
    const EstimatorWeights w = random_weights(rng);
    const Vec4 dq = solve_delta_q(q, dp, w, L);
    const double obj = dq.dot(w.q_diag.cwiseProduct(dq));

    const Jacobian3x4 J = jacobian(q, L);
    const Vec4 dq_h = pseudo_inverse(J) * dp;
    const Vec4 mu = null_space_vector(J);
    for (int k = 0; k < 1000; ++k) {
      const Vec4 feasible = dq_h + lam(rng) * mu;
      CHECK(obj <= feasible.dot(w.q_diag.cwiseProduct(feasible)) + 1e-12);
    }
  }
}

TEST_CASE("singular jacobian is rejected by the weighted solve") {
  const LimbLengths L = test_arm();
  CHECK_THROWS_AS(solve_delta_q(JointAngles{0, 0, 0, 0}, Vec3(0.001, 0, 0),
                                kReferenceStretchWeights, L),
                  SingularJacobian);
}

TEST_CASE("step estimate is a fixed point at the current hand") {
  const LimbLengths L = test_arm();
  const JointAngles q{0.3, -0.2, 1.1, 0.5};
  const PostureEstimate prev{q, 4};
  const PostureEstimate next =
      step_estimate(prev, forward_kinematics_hand(q, L), L,
                    kReferenceStretchWeights);
  CHECK((next.q_hat.vector() - q.vector()).norm() < 1e-12);
  CHECK(next.step_index == 5);
}

TEST_CASE("step estimate lands the hand on the target") {
  const LimbLengths L = test_arm();
  // A known smooth joint trajectory generates the hand path.
  const JointAngles q0{0.2, -0.3, 1.4, 0.2};
  PostureEstimate est{q0, 0};
  for (int i = 1; i <= 100; ++i) {
    const double t = 0.01 * i;
    const JointAngles q{0.2 + 0.3 * t, -0.3 + 0.2 * t, 1.4 - 0.9 * t,
                        0.2 + 0.4 * t};
    const Point3 target = forward_kinematics_hand(q, L);
    est = step_estimate(est, target, L, kReferenceStretchWeights);
    CHECK((forward_kinematics_hand(est.q_hat, L) - target).norm() < 1e-6);
  }
}

TEST_CASE("step estimate rejects unreachable hands") {
  const LimbLengths L = test_arm();
  const PostureEstimate est{JointAngles{0, 0, 1.0, 0}, 0};
  const Point3 too_far = 1.1 * L.reach() * Vec3(0, 0, -1);
  CHECK_THROWS_AS(step_estimate(est, too_far, L, kReferenceStretchWeights),
                  UnreachableHand);
}

TEST_CASE("tracking a constant hand path keeps the posture") {
  const LimbLengths L = test_arm();
  const ArmPosture initial =
      forward_kinematics(JointAngles{0.2, -0.3, 1.4, 0.2}, L);
  const std::vector<Point3> path(10, initial.hand);
  const auto trace = track(initial, path, L, kReferenceStretchWeights);
  REQUIRE(trace.size() == 10);
  for (const auto& p : trace) {
    CHECK((p.elbow - initial.elbow).norm() < 1e-9);
    CHECK((p.hand - initial.hand).norm() < 1e-9);
  }
}

TEST_CASE("tracking rejects a displaced path start") {
  const LimbLengths L = test_arm();
  const ArmPosture initial =
      forward_kinematics(JointAngles{0.2, -0.3, 1.4, 0.2}, L);
  std::vector<Point3> path{initial.hand + Vec3(0.05, 0, 0)};
  CHECK_THROWS_AS(track(initial, path, L, kReferenceStretchWeights),
                  PathStartMismatch);
}

TEST_CASE("hand in dressing frame applies the calibration") {
  RigidTransform T;
  T.rotation = Eigen::AngleAxisd(kPi / 2, Vec3::UnitZ()).toRotationMatrix();
  T.translation = Vec3(0.5, 0, 0);
  CHECK((hand_in_dressing_frame(Point3(1, 0, 0), T) - Point3(0.5, 1, 0))
            .norm() < 1e-15);
  CHECK((hand_in_dressing_frame(Point3(0, 0, 0), RigidTransform{}) -
         Point3(0, 0, 0))
            .norm() < 1e-15);
}
