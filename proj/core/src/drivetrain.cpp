#include "forte/drivetrain.hpp"

#include <cmath>

#include <fmt/format.h>

#include "forte/units.hpp"

namespace forte::drivetrain {

double capstan_reduction(double small_diameter, double large_diameter, CapstanMode mode) {
  if (!std::isfinite(small_diameter) || !std::isfinite(large_diameter) || small_diameter <= 0.0) {
    throw Error(ErrorCode::kInvalidGeometry,
                fmt::format("capstan sheave diameter must be positive, got {}", small_diameter));
  }
  if (large_diameter < small_diameter) {
    throw Error(ErrorCode::kInvalidGeometry,
                fmt::format("capstan pulley diameter {} is smaller than sheave diameter {}",
                            large_diameter, small_diameter));
  }
  const double quotient = large_diameter / small_diameter;
  return mode == CapstanMode::kStationary ? quotient + 1.0 : quotient;
}

void check_geometry(const CapstanGeometry& geometry) {
  capstan_reduction(geometry.sheave_diameter, geometry.pulley_diameter, geometry.mode);
  if (!(geometry.cable_thickness > 0.0) || !std::isfinite(geometry.cable_thickness)) {
    throw Error(ErrorCode::kInvalidGeometry,
                fmt::format("cable thickness must be positive, got {}", geometry.cable_thickness));
  }
  if (!(geometry.tolerance >= 0.0) || !std::isfinite(geometry.tolerance)) {
    throw Error(ErrorCode::kInvalidGeometry,
                fmt::format("winding tolerance must be non-negative, got {}", geometry.tolerance));
  }
}

double capstan_reduction(const CapstanGeometry& geometry) {
  check_geometry(geometry);
  return capstan_reduction(geometry.sheave_diameter, geometry.pulley_diameter, geometry.mode);
}

double sheave_height(double cable_thickness, double gamma, double tolerance) {
  return cable_thickness * gamma + tolerance;
}

double sheave_height(const CapstanGeometry& geometry, double gamma) {
  return sheave_height(geometry.cable_thickness, gamma, geometry.tolerance);
}

double sheave_spacing(double cable_thickness) { return 1.5 * cable_thickness; }

double windings_required(double gamma, double output_range_deg) {
  return gamma * output_range_deg / 360.0;
}

double total_reduction(const JointDrive& drive) {
  double product = 1.0;
  for (const auto& stage : drive.stages) product *= stage.ratio;
  return product;
}

double max_joint_torque(const JointDrive& drive) {
  return drive.motor.holding_torque * total_reduction(drive);
}

double joint_resolution_deg(const JointDrive& drive) {
  return 360.0 / (static_cast<double>(drive.motor.steps_per_rev) * drive.microstep_factor *
                  total_reduction(drive));
}

double joint_resolution_rad(const JointDrive& drive) {
  return deg_to_rad(joint_resolution_deg(drive));
}

std::array<TorqueTableRow, kJointCount> torque_table(const ArmDescription& arm) {
  std::array<TorqueTableRow, kJointCount> rows;
  for (int j = 0; j < kJointCount; ++j) {
    const auto& drive = arm.drives[j];
    auto& row = rows[j];
    row.joint_index = drive.joint_index;
    row.motor = drive.motor.name;
    row.holding_torque = drive.motor.holding_torque;
    row.mechanism = drive.mechanism;
    row.total_reduction = total_reduction(drive);
    row.max_joint_torque = max_joint_torque(drive);
    if (drive.reference_max_torque &&
        std::abs(*drive.reference_max_torque - row.max_joint_torque) > kTableTolerance) {
      row.annotation = TableAnnotation{
          "table_inconsistency", *drive.reference_max_torque, row.max_joint_torque,
          fmt::format("tabulated {:.5g} N*m does not equal {:.5g} N*m x {:.5g} = {:.5g} N*m",
                      *drive.reference_max_torque, row.holding_torque, row.total_reduction,
                      row.max_joint_torque)};
    }
  }
  return rows;
}

}  // namespace forte::drivetrain
