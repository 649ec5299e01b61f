#include "forte/kinematics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "halton.hpp"

namespace forte {

Eigen::Matrix4d dh_transform(const DhRow& row, double q, DhConvention convention) {
  const double theta = q + row.theta_offset;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Eigen::Matrix4d t;
  if (convention == DhConvention::kStandard) {
    // Rz(theta) Tz(d) Tx(a) Rx(alpha)
    t << ct, -st * ca, st * sa, row.a * ct,
         st, ct * ca, -ct * sa, row.a * st,
         0.0, sa, ca, row.d,
         0.0, 0.0, 0.0, 1.0;
  } else {
    // Rx(alpha) Tx(a) Rz(theta) Tz(d)
    t << ct, -st, 0.0, row.a,
         st * ca, ct * ca, -sa, -sa * row.d,
         st * sa, ct * sa, ca, ca * row.d,
         0.0, 0.0, 0.0, 1.0;
  }
  return t;
}

std::array<Eigen::Matrix4d, kJointCount + 1> link_frames(const ArmDescription& arm, const JointVector& q) {
  std::array<Eigen::Matrix4d, kJointCount + 1> frames;
  frames[0].setIdentity();
  for (int i = 0; i < kJointCount; ++i) {
    frames[i + 1] = frames[i] * dh_transform(arm.dh[i], q[i], arm.convention);
  }
  return frames;
}

JointAxes joint_axes(const ArmDescription& arm, const std::array<Eigen::Matrix4d, kJointCount + 1>& frames) {
  const int shift = arm.convention == DhConvention::kStandard ? 0 : 1;
  JointAxes axes;
  for (int i = 0; i < kJointCount; ++i) {
    const auto& f = frames[i + shift];
    axes.direction[i] = f.block<3, 1>(0, 2);
    axes.origin[i] = f.block<3, 1>(0, 3);
  }
  return axes;
}

Pose forward_kinematics(const ArmDescription& arm, const JointVector& q) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (int i = 0; i < kJointCount; ++i) t = t * dh_transform(arm.dh[i], q[i], arm.convention);
  return {t.block<3, 1>(0, 3), t.block<3, 3>(0, 0)};
}

Jacobian jacobian(const ArmDescription& arm, const JointVector& q) {
  const auto frames = link_frames(arm, q);
  const auto axes = joint_axes(arm, frames);
  const Eigen::Vector3d p = frames[kJointCount].block<3, 1>(0, 3);
  Jacobian j;
  for (int i = 0; i < kJointCount; ++i) {
    j.block<3, 1>(0, i) = axes.direction[i].cross(p - axes.origin[i]);
    j.block<3, 1>(3, i) = axes.direction[i];
  }
  return j;
}

bool within_limits(const ArmDescription& arm, const JointVector& q) {
  for (int i = 0; i < kJointCount; ++i) {
    if (!arm.limits[i].contains(q[i])) return false;
  }
  return true;
}

JointVector clamp_to_limits(const ArmDescription& arm, const JointVector& q) {
  JointVector out;
  for (int i = 0; i < kJointCount; ++i) out[i] = std::clamp(q[i], arm.limits[i].min, arm.limits[i].max);
  return out;
}

Eigen::Vector3d orientation_error(const Eigen::Matrix3d& target, const Eigen::Matrix3d& current) {
  const Eigen::AngleAxisd aa(Eigen::Quaterniond(target * current.transpose()).normalized());
  return aa.angle() * aa.axis();
}

namespace {

using Residual = Eigen::Matrix<double, 6, 1>;

Residual residual(const ArmDescription& arm, const Pose& target, const JointVector& q) {
  const Pose pose = forward_kinematics(arm, q);
  Residual e;
  e.head<3>() = target.position - pose.position;
  e.tail<3>() = orientation_error(target.orientation, pose.orientation);
  return e;
}

bool converged(const Residual& e, const IkOptions& o) {
  return e.head<3>().norm() < o.position_tolerance && e.tail<3>().norm() < o.orientation_tolerance;
}

// Damped least-squares step. Joints the step would push past a limit are
// frozen at that limit and the step is re-solved over the rest, so the
// remaining joints absorb the motion the clamp would otherwise discard.
JointVector limited_step(const ArmDescription& arm, const JointVector& q, const Residual& e, double lambda) {
  const Jacobian full = jacobian(arm, q);
  JointVector target_step = JointVector::Zero();
  std::array<bool, kJointCount> frozen{};
  for (int pass = 0; pass < kJointCount; ++pass) {
    Jacobian j = full;
    Residual r = e;
    for (int i = 0; i < kJointCount; ++i) {
      if (!frozen[i]) continue;
      j.col(i).setZero();
      r -= full.col(i) * target_step[i];
    }
    Eigen::Matrix<double, 6, 6> normal = j.transpose() * j;
    normal.diagonal().array() += lambda * lambda;
    JointVector step = normal.ldlt().solve(j.transpose() * r);
    bool changed = false;
    for (int i = 0; i < kJointCount; ++i) {
      if (frozen[i]) {
        step[i] = target_step[i];
        continue;
      }
      const double next = q[i] + step[i];
      const double bound = next > arm.limits[i].max ? arm.limits[i].max
                           : next < arm.limits[i].min ? arm.limits[i].min
                                                      : next;
      if (bound != next) {
        frozen[i] = true;
        target_step[i] = bound - q[i];
        changed = true;
      }
    }
    if (!changed) return step;
  }
  return target_step;
}

enum class Outcome { kConverged, kStagnated, kExhausted };

struct Attempt {
  Outcome outcome = Outcome::kExhausted;
  JointVector q;
  Residual error;
  int iterations = 0;
};

Attempt solve_from(const ArmDescription& arm, const Pose& target, const JointVector& start, const IkOptions& o) {
  Attempt a;
  a.q = clamp_to_limits(arm, start);
  a.error = residual(arm, target, a.q);
  double lambda = std::max(o.damping, o.min_damping);
  double norm = a.error.norm();
  double window_best = norm;
  int since_progress = 0;

  while (!converged(a.error, o)) {
    if (a.iterations >= o.max_iterations) {
      a.outcome = Outcome::kExhausted;
      return a;
    }
    ++a.iterations;
    const JointVector candidate = clamp_to_limits(arm, a.q + limited_step(arm, a.q, a.error, lambda));
    const Residual e = residual(arm, target, candidate);
    const double n = e.norm();
    if (n < norm) {
      a.q = candidate;
      a.error = e;
      norm = n;
      lambda = std::max(lambda / 3.0, o.min_damping);
    } else {
      lambda *= 4.0;
      if (lambda > o.max_damping) {
        a.outcome = Outcome::kStagnated;
        return a;
      }
    }
    if (norm < window_best * (1.0 - 1e-3)) {
      window_best = norm;
      since_progress = 0;
    } else if (++since_progress >= o.stagnation_window) {
      a.outcome = Outcome::kStagnated;
      return a;
    }
  }
  a.outcome = Outcome::kConverged;
  return a;
}

JointVector restart_point(const ArmDescription& arm, int index) {
  JointVector q;
  for (int i = 0; i < kJointCount; ++i) {
    const double u = detail::radical_inverse(static_cast<std::uint64_t>(index), detail::kHaltonBases[i]);
    q[i] = arm.limits[i].min + u * arm.limits[i].span();
  }
  return q;
}

}  // namespace

IkResult inverse_kinematics(const ArmDescription& arm, const Pose& target, const JointVector& seed,
                            const IkOptions& options) {
  if (!seed.allFinite()) throw Error(ErrorCode::kValidation, "IK seed contains non-finite values");
  Attempt best;
  best.error.setConstant(std::numeric_limits<double>::infinity());
  bool any_exhausted = false;
  int total_iterations = 0;

  for (int attempt = 0; attempt <= std::max(0, options.restarts); ++attempt) {
    const JointVector start = attempt == 0 ? seed : restart_point(arm, attempt);
    Attempt a = solve_from(arm, target, start, options);
    total_iterations += a.iterations;
    if (a.outcome == Outcome::kConverged) {
      return {a.q, total_iterations, a.error.head<3>().norm(), a.error.tail<3>().norm()};
    }
    any_exhausted = any_exhausted || a.outcome == Outcome::kExhausted;
    if (a.error.norm() < best.error.norm()) best = a;
  }

  const double pos = best.error.head<3>().norm();
  const double ori = best.error.tail<3>().norm();
  const auto code = any_exhausted ? ErrorCode::kNoConvergence : ErrorCode::kUnreachable;
  const auto what = any_exhausted
                        ? fmt::format("IK did not converge in {} iterations; best residual {:.3e} m, {:.3e} rad",
                                      total_iterations, pos, ori)
                        : fmt::format("IK target unreachable: residual stagnated at {:.3e} m, {:.3e} rad", pos, ori);
  throw IkFailure(code, what, best.q, pos, ori);
}

}  // namespace forte
