#include <gtest/gtest.h>

#include <random>

#include "forte/kinematics.hpp"
#include "forte/statics.hpp"
#include "forte/units.hpp"
#include "test_support.hpp"

namespace forte {
namespace {

using test::default_arm;
using test::deg;

ArmDescription massless(const ArmDescription& arm) {
  ArmDescription a = arm;
  for (auto& l : a.mass_model.links) l.mass = 0.0;
  for (auto& d : a.drives) d.motor.mass = 0.0;
  return a;
}

PosePolicy fixed(const JointVector& q) {
  PosePolicy p;
  p.kind = PosePolicy::Kind::kFixed;
  p.q = q;
  return p;
}

TEST(Statics, MasslessArmHasNoTorque) {
  const auto t = gravity_torques(massless(default_arm()), deg(10, 20, 30, 40, 50, 60), 0.0);
  EXPECT_EQ(t, JointVector::Zero());
  const auto r = static_report(massless(default_arm()), JointVector::Zero(), 0.0);
  EXPECT_EQ(r.utilization, JointVector::Zero());
}

TEST(Statics, PayloadOnShoulderVerticalHasNoShoulderMoment) {
  // Upper arm straight up; bisect the elbow so the tool sits above the base.
  const auto arm = massless(default_arm());
  auto x_at = [&](double q3) { return forward_kinematics(arm, deg(0, 90, q3, 0, 0, 0)).position.x(); };
  double lo = -90.0, hi = 90.0;
  ASSERT_LT(x_at(lo) * x_at(hi), 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (x_at(mid) * x_at(lo) > 0.0 ? lo : hi) = mid;
  }
  const JointVector q = deg(0, 90, lo, 0, 0, 0);
  ASSERT_NEAR(forward_kinematics(arm, q).position.x(), 0.0, 1e-12);
  EXPECT_NEAR(gravity_torques(arm, q, 1.0)[1], 0.0, 1e-9);
}

TEST(Statics, HorizontalPayloadMomentByHand) {
  // 0.63 kg at 0.467 m horizontal lever about the shoulder axis.
  const double hand = 0.63 * 9.81 * 0.467;
  EXPECT_NEAR(hand, 2.8862, 1e-4);
  const auto arm = massless(default_arm());
  const double lever = forward_kinematics(arm, JointVector::Zero()).position.x();
  EXPECT_NEAR(std::abs(gravity_torques(arm, JointVector::Zero(), 0.63)[1]), 0.63 * 9.81 * lever, 1e-12);
}

TEST(Statics, GravityTorqueLinearInPayload) {
  const auto arm = massless(default_arm());
  std::mt19937_64 rng(11);
  for (int n = 0; n < 50; ++n) {
    const JointVector q = test::random_q(arm, rng);
    const JointVector sum = gravity_torques(arm, q, 0.3) + gravity_torques(arm, q, 0.45);
    EXPECT_LT((gravity_torques(arm, q, 0.75) - sum).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Statics, YawAndRollAxesCarryNoGravityLoadAtHome) {
  const auto t = gravity_torques(default_arm(), JointVector::Zero(), 0.5);
  EXPECT_NEAR(t[0], 0.0, 1e-12);
  EXPECT_NEAR(t[3], 0.0, 1e-12);
  EXPECT_NEAR(t[5], 0.0, 1e-12);
}

TEST(Statics, TorquesMatchFiniteDifferenceOfPotentialEnergy) {
  // The holding torque balances gravity: tau = dV/dq with V = m g z.
  const auto arm = massless(default_arm());
  std::mt19937_64 rng(12);
  for (int n = 0; n < 20; ++n) {
    const JointVector q = test::random_q(arm, rng);
    const JointVector t = gravity_torques(arm, q, 1.0);
    for (int j = 0; j < kJointCount; ++j) {
      JointVector a = q, b = q;
      a[j] += 1e-6;
      b[j] -= 1e-6;
      const double dv = 9.81 * (forward_kinematics(arm, a).position.z() - forward_kinematics(arm, b).position.z()) / 2e-6;
      EXPECT_NEAR(t[j], dv, 1e-6) << "J" << j + 1;
    }
  }
}

TEST(Statics, ReportAtHomeIsWithinLimits) {
  const auto r = static_report(default_arm(), JointVector::Zero(), 0.0);
  for (int j = 0; j < kJointCount; ++j) {
    EXPECT_LT(r.utilization[j], 1.0);
    EXPECT_NEAR(r.utilization[j], std::abs(r.required[j]) / r.available[j], 1e-15);
  }
  int argmax;
  r.utilization.maxCoeff(&argmax);
  EXPECT_EQ(r.limiting_joint, argmax + 1);
}

TEST(Statics, TenKilogramsOverloads) {
  const auto r = static_report(default_arm(), JointVector::Zero(), 10.0);
  EXPECT_GT(r.utilization.maxCoeff(), 1.0);
}

TEST(Statics, ZeroTorqueLimitsGiveZeroPayload) {
  ArmDescription arm = default_arm();
  for (auto& d : arm.drives) {
    d.motor.holding_torque = 0.0;
    d.motor.torque_speed_curve = {{0.0, 0.0}};
  }
  const auto r = max_payload(arm);
  EXPECT_EQ(r.payload, 0.0);
  EXPECT_TRUE(r.structure_overloaded);
}

TEST(Statics, StrongerMotorsCarryMore) {
  ArmDescription arm = default_arm();
  const double before = max_payload(arm).payload;
  for (auto& d : arm.drives) {
    d.motor.holding_torque *= 2.0;
    for (auto& p : d.motor.torque_speed_curve) p.torque *= 2.0;
  }
  EXPECT_GT(max_payload(arm).payload, before);
}

TEST(Statics, HeavierLinksCarryLess) {
  ArmDescription arm = default_arm();
  const double before = max_payload(arm).payload;
  arm.mass_model.links[5].mass += 0.1;  // wrist housing
  EXPECT_LE(max_payload(arm).payload, before);
  arm = default_arm();
  arm.drives[4].motor.mass += 0.5;
  EXPECT_LE(max_payload(arm).payload, before);
}

TEST(Statics, LimitingUtilizationAtMaxPayload) {
  const auto r = max_payload(default_arm());
  EXPECT_GE(r.limiting_utilization, 1.0 - 1e-3);
  EXPECT_LE(r.limiting_utilization, 1.0);
  EXPECT_LE(r.bracket_high - r.bracket_low, kPayloadTolerance);
  // Report is self-consistent with the per-joint capacities.
  EXPECT_NEAR(r.joint_capacity[r.limiting_joint - 1], r.payload, kPayloadTolerance);
  const auto rep = static_report(default_arm(), r.limiting_pose, r.payload);
  EXPECT_NEAR(rep.utilization[r.limiting_joint - 1], r.limiting_utilization, 1e-12);
}

TEST(Statics, FixedPolicyMatchesAnalyticCapacity) {
  const JointVector q = JointVector::Zero();
  const auto r = max_payload(default_arm(), fixed(q));
  EXPECT_EQ(r.poses, 1u);
  const JointVector s = gravity_torques(default_arm(), q, 0.0);
  const JointVector u = gravity_torques(default_arm(), q, 1.0) - s;
  const JointVector a = available_torques(default_arm());
  double expected = 1e9;
  for (int j = 0; j < kJointCount; ++j) {
    if (std::abs(u[j]) > 1e-9) expected = std::min(expected, (a[j] - std::abs(s[j])) / std::abs(u[j]));
  }
  EXPECT_NEAR(r.payload, expected, kPayloadTolerance);
}

TEST(Statics, SweepCoversLimitsOnSweptJoints) {
  PosePolicy p;
  const auto poses = policy_poses(default_arm(), p);
  // 15 deg steps over 210, 180 and 180 deg, both ends included.
  EXPECT_EQ(poses.size(), 15u * 13u * 13u);
  bool has_min = false, has_max = false;
  for (const auto& q : poses) {
    has_min |= q[1] == default_arm().limits[1].min;
    has_max |= q[1] == default_arm().limits[1].max;
    EXPECT_EQ(q[0], 0.0);
  }
  EXPECT_TRUE(has_min && has_max);
}

TEST(Statics, SweepIsThreadInvariant) {
  PosePolicy p;
  p.threads = 1;
  const auto a = max_payload(default_arm(), p);
  p.threads = 5;
  const auto b = max_payload(default_arm(), p);
  EXPECT_EQ(a.payload, b.payload);
  EXPECT_EQ(a.limiting_joint, b.limiting_joint);
  EXPECT_EQ(a.limiting_pose, b.limiting_pose);
}

}  // namespace
}  // namespace forte
