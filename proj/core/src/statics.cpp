#include "forte/statics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "forte/drivetrain.hpp"
#include "forte/parallel.hpp"

namespace forte {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SplitTorques {
  JointVector structure = JointVector::Zero();
  JointVector per_payload = JointVector::Zero();
};

SplitTorques split_torques(const ArmDescription& arm, const JointVector& q) {
  const auto frames = link_frames(arm, q);
  const auto axes = joint_axes(arm, frames);
  const auto& mm = arm.mass_model;
  const Eigen::Vector3d g = mm.gravity * mm.gravity_direction.normalized();

  auto in_base = [&](int link, const Eigen::Vector3d& local) -> Eigen::Vector3d {
    return (frames[link] * local.homogeneous()).head<3>();
  };
  // Joint i carries every body on link i or later.
  auto add = [&](JointVector& tau, int link, double mass, const Eigen::Vector3d& p) {
    if (mass == 0.0) return;
    for (int i = 0; i < std::min(link, kJointCount); ++i) {
      tau[i] -= axes.direction[i].dot((p - axes.origin[i]).cross(mass * g));
    }
  };

  SplitTorques out;
  for (const auto& l : mm.links) add(out.structure, l.link, l.mass, in_base(l.link, l.com));
  for (const auto& m : mm.motors) {
    add(out.structure, m.link, arm.drive(m.joint).motor.mass, in_base(m.link, m.offset));
  }
  add(out.per_payload, kJointCount, 1.0, frames[kJointCount].block<3, 1>(0, 3));
  return out;
}

double utilization_of(double required, double available) {
  if (available > 0.0) return std::abs(required) / available;
  return required == 0.0 ? 0.0 : kInf;
}

// Per-kg torques below this are rounding residue of a zero lever arm, N*m/kg.
constexpr double kNegligiblePerPayload = 1e-9;

// Largest m >= 0 with |s + m u| <= a; 0 when even m = 0 overloads.
double joint_capacity(double s, double u, double a) {
  if (std::abs(s) > a) return 0.0;
  if (u > kNegligiblePerPayload) return (a - s) / u;
  if (u < -kNegligiblePerPayload) return (a + s) / -u;
  return kInf;
}

}  // namespace

JointVector gravity_torques(const ArmDescription& arm, const JointVector& q, double payload) {
  const auto t = split_torques(arm, q);
  return t.structure + payload * t.per_payload;
}

JointVector available_torques(const ArmDescription& arm) {
  JointVector a;
  for (int i = 0; i < kJointCount; ++i) a[i] = drivetrain::max_joint_torque(arm.drives[i]);
  return a;
}

StaticLoadReport static_report(const ArmDescription& arm, const JointVector& q, double payload) {
  StaticLoadReport r;
  r.required = gravity_torques(arm, q, payload);
  r.available = available_torques(arm);
  for (int i = 0; i < kJointCount; ++i) r.utilization[i] = utilization_of(r.required[i], r.available[i]);
  Eigen::Index worst = 0;
  r.utilization.maxCoeff(&worst);
  r.limiting_joint = static_cast<int>(worst) + 1;
  return r;
}

std::vector<JointVector> policy_poses(const ArmDescription& arm, const PosePolicy& policy) {
  if (policy.kind == PosePolicy::Kind::kFixed) return {policy.q};
  if (!(policy.step > 0.0)) throw Error(ErrorCode::kValidation, "pose sweep step must be positive");

  std::array<std::vector<double>, kJointCount> values;
  for (int j = 0; j < kJointCount; ++j) {
    if (!policy.swept[j]) {
      values[j] = {policy.q[j]};
      continue;
    }
    const auto& lim = arm.limits[j];
    const int intervals = std::max(1, static_cast<int>(std::ceil(lim.span() / policy.step - 1e-9)));
    for (int k = 0; k <= intervals; ++k) {
      values[j].push_back(k == intervals ? lim.max : lim.min + k * policy.step);
    }
  }
  std::vector<JointVector> poses{JointVector::Zero()};
  for (int j = 0; j < kJointCount; ++j) {
    std::vector<JointVector> next;
    next.reserve(poses.size() * values[j].size());
    for (const auto& p : poses) {
      for (double v : values[j]) {
        next.push_back(p);
        next.back()[j] = v;
      }
    }
    poses = std::move(next);
  }
  return poses;
}

std::vector<PoseLoad> pose_loads(const ArmDescription& arm, const PosePolicy& policy) {
  const auto poses = policy_poses(arm, policy);
  const JointVector available = available_torques(arm);
  std::vector<PoseLoad> loads(poses.size());
  parallel_for(poses.size(), policy.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& l = loads[i];
      const auto t = split_torques(arm, poses[i]);
      l.q = poses[i];
      l.structure = t.structure;
      l.per_payload = t.per_payload;
      for (int j = 0; j < kJointCount; ++j) {
        l.capacity[j] = joint_capacity(t.structure[j], t.per_payload[j], available[j]);
      }
    }
  });
  return loads;
}

PayloadResult max_payload(const ArmDescription& arm, const PosePolicy& policy, double tolerance) {
  const auto loads = pose_loads(arm, policy);
  const JointVector available = available_torques(arm);

  PayloadResult r;
  r.poses = loads.size();
  r.joint_capacity.fill(kInf);
  for (const auto& l : loads) {
    for (int j = 0; j < kJointCount; ++j) r.joint_capacity[j] = std::min(r.joint_capacity[j], l.capacity[j]);
  }

  auto feasible = [&](double m) {
    for (const auto& l : loads) {
      for (int j = 0; j < kJointCount; ++j) {
        if (std::abs(l.structure[j] + m * l.per_payload[j]) > available[j]) return false;
      }
    }
    return true;
  };

  double lo = 0.0;
  double hi = 1.0;
  if (!feasible(0.0)) {
    r.structure_overloaded = true;
    hi = 0.0;
  } else {
    while (feasible(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > kPayloadCeiling) {
        throw Error(ErrorCode::kNoConvergence,
                    fmt::format("payload search found no overload below {} kg (bracket [{}, {}])",
                                kPayloadCeiling, lo, hi));
      }
    }
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
      ++r.iterations;
    }
  }
  r.payload = lo;
  r.bracket_low = lo;
  r.bracket_high = hi;

  r.limiting_utilization = -1.0;
  for (const auto& l : loads) {
    for (int j = 0; j < kJointCount; ++j) {
      const double u = utilization_of(l.structure[j] + lo * l.per_payload[j], available[j]);
      if (u > r.limiting_utilization) {
        r.limiting_utilization = u;
        r.limiting_joint = j + 1;
        r.limiting_pose = l.q;
      }
    }
  }
  return r;
}

}  // namespace forte
