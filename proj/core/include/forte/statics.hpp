#pragma once

#include <array>
#include <vector>

#include "forte/arm_model.hpp"
#include "forte/kinematics.hpp"

namespace forte {

// Holding torque each joint must supply against gravity, N*m about its own
// axis (positive along the axis direction). Sums link masses, placed motors
// and `payload` (kg, at the end-effector origin) distal to each joint.
JointVector gravity_torques(const ArmDescription& arm, const JointVector& q, double payload);

// Torque available at standstill: holding torque through the full reduction.
JointVector available_torques(const ArmDescription& arm);

struct StaticLoadReport {
  JointVector required = JointVector::Zero();     // N*m, signed
  JointVector available = JointVector::Zero();    // N*m
  JointVector utilization = JointVector::Zero();  // |required| / available
  int limiting_joint = 1;                         // 1..6, highest utilization
};

StaticLoadReport static_report(const ArmDescription& arm, const JointVector& q, double payload);

struct PosePolicy {
  enum class Kind { kWorstCaseSweep, kFixed };
  Kind kind = Kind::kWorstCaseSweep;
  // kFixed: the pose. kWorstCaseSweep: values of the joints not swept.
  JointVector q = JointVector::Zero();
  // Joints 1, 4 and 6 leave gravity moments about their own axes unchanged
  // for a vertical base axis, so the default sweep skips them.
  std::array<bool, kJointCount> swept{false, true, true, false, true, false};
  double step = 0.2617993877991494;  // rad (15 deg)
  unsigned threads = 0;
};

// Poses visited by `policy`; swept joints run min..max in `step` increments,
// always including both limits.
std::vector<JointVector> policy_poses(const ArmDescription& arm, const PosePolicy& policy);

// Gravity torque at one pose split into its payload-free part and its
// per-kilogram payload slope.
struct PoseLoad {
  JointVector q;
  JointVector structure;    // N*m at zero payload
  JointVector per_payload;  // N*m per kg
  std::array<double, kJointCount> capacity{};  // largest payload each joint holds alone, kg
};

std::vector<PoseLoad> pose_loads(const ArmDescription& arm, const PosePolicy& policy);

struct PayloadResult {
  double payload = 0.0;           // kg
  int limiting_joint = 1;         // 1..6
  JointVector limiting_pose = JointVector::Zero();
  double limiting_utilization = 0.0;
  // Worst case over the poses of each joint's own payload limit, kg.
  std::array<double, kJointCount> joint_capacity{};
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  int iterations = 0;
  std::size_t poses = 0;
  bool structure_overloaded = false;  // arm cannot hold itself somewhere
};

inline constexpr double kPayloadTolerance = 1e-4;  // kg
inline constexpr double kPayloadCeiling = 1e4;     // kg

// Largest payload every joint holds at every policy pose, by bisection to
// `tolerance`. Returns the feasible end of the final bracket. Throws
// Error(kNoConvergence) with the bracket if no infeasible payload exists
// below kPayloadCeiling.
PayloadResult max_payload(const ArmDescription& arm, const PosePolicy& policy = {},
                          double tolerance = kPayloadTolerance);

}  // namespace forte
