#pragma once

#include <array>
#include <optional>
#include <string>

#include "forte/arm_model.hpp"

namespace forte::drivetrain {

// Reduction of a capstan pair. A rotating pulley gives the plain diameter
// quotient; a stationary pulley adds one turn per orbit of the sheave.
// Throws Error(kInvalidGeometry) unless 0 < small <= large.
double capstan_reduction(double small_diameter, double large_diameter, CapstanMode mode);
double capstan_reduction(const CapstanGeometry& geometry);

// Throws Error(kInvalidGeometry) describing the first broken invariant.
void check_geometry(const CapstanGeometry& geometry);

// Drum height needed to stack the windings: h = t * gamma + delta.
double sheave_height(double cable_thickness, double gamma, double tolerance);
double sheave_height(const CapstanGeometry& geometry, double gamma);

// Lateral sheave-to-pulley spacing: s = 1.5 t.
double sheave_spacing(double cable_thickness);

// Turns of cable on the sheave for `output_range_deg` of output travel.
// Real-valued; callers round up when budgeting cable.
double windings_required(double gamma, double output_range_deg);

// Product of stage ratios; 1 for a direct drive.
double total_reduction(const JointDrive& drive);

// Holding torque amplified through the full reduction.
double max_joint_torque(const JointDrive& drive);

// Output angle per driver microstep, degrees.
double joint_resolution_deg(const JointDrive& drive);
double joint_resolution_rad(const JointDrive& drive);

struct TableAnnotation {
  std::string code;  // "table_inconsistency"
  double reference_torque = 0.0;
  double computed_torque = 0.0;
  std::string message;
};

struct TorqueTableRow {
  int joint_index = 0;
  std::string motor;
  double holding_torque = 0.0;
  std::string mechanism;
  double total_reduction = 0.0;
  double max_joint_torque = 0.0;
  std::optional<TableAnnotation> annotation;
};

// Half a unit in the fourth decimal: tabulated torques are given to 4-5
// significant decimals.
inline constexpr double kTableTolerance = 5e-5;

std::array<TorqueTableRow, kJointCount> torque_table(const ArmDescription& arm);

}  // namespace forte::drivetrain
