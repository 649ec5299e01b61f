#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "forte/arm_model.hpp"

namespace forte {

using JointVector = Eigen::Matrix<double, kJointCount, 1>;
using Jacobian = Eigen::Matrix<double, 6, kJointCount>;

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();
};

// Homogeneous transform of one DH row at joint angle q.
Eigen::Matrix4d dh_transform(const DhRow& row, double q, DhConvention convention);

// Frames 0 (base) through 6 (end effector) in the base frame.
std::array<Eigen::Matrix4d, kJointCount + 1> link_frames(const ArmDescription& arm, const JointVector& q);

// Axis direction and a point on the axis of each joint, base frame.
struct JointAxes {
  std::array<Eigen::Vector3d, kJointCount> direction;
  std::array<Eigen::Vector3d, kJointCount> origin;
};
JointAxes joint_axes(const ArmDescription& arm, const std::array<Eigen::Matrix4d, kJointCount + 1>& frames);

Pose forward_kinematics(const ArmDescription& arm, const JointVector& q);

// Geometric Jacobian: rows 0-2 linear velocity (m/rad), rows 3-5 angular.
Jacobian jacobian(const ArmDescription& arm, const JointVector& q);

bool within_limits(const ArmDescription& arm, const JointVector& q);
JointVector clamp_to_limits(const ArmDescription& arm, const JointVector& q);

// Rotation vector of target * current^T.
Eigen::Vector3d orientation_error(const Eigen::Matrix3d& target, const Eigen::Matrix3d& current);

struct IkOptions {
  double position_tolerance = 1e-6;     // m
  double orientation_tolerance = 1e-6;  // rad
  int max_iterations = 200;
  double damping = 1e-3;       // initial lambda
  double min_damping = 1e-6;   // lambda floor
  double max_damping = 1e3;    // lambda ceiling before declaring stagnation
  int stagnation_window = 25;  // iterations without 0.1% residual improvement
  // Extra deterministic starts spread over the joint limits, tried in order
  // after `seed` fails.
  int restarts = 32;
};

struct IkResult {
  JointVector q;
  int iterations = 0;  // summed over all starts
  double position_error = 0.0;
  double orientation_error = 0.0;
};

// Thrown with ErrorCode::kNoConvergence or kUnreachable.
class IkFailure : public Error {
 public:
  IkFailure(ErrorCode code, const std::string& what, JointVector best_q, double best_position_error,
            double best_orientation_error)
      : Error(code, what),
        best_q_(best_q),
        best_position_error_(best_position_error),
        best_orientation_error_(best_orientation_error) {}

  const JointVector& best_q() const { return best_q_; }
  double best_position_error() const { return best_position_error_; }
  double best_orientation_error() const { return best_orientation_error_; }

 private:
  JointVector best_q_;
  double best_position_error_;
  double best_orientation_error_;
};

// Levenberg-Marquardt damped least squares, clamped to the joint limits each
// iteration. The returned q always satisfies both tolerances.
IkResult inverse_kinematics(const ArmDescription& arm, const Pose& target, const JointVector& seed,
                            const IkOptions& options = {});

}  // namespace forte
