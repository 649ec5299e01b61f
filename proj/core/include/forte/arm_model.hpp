#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "forte/error.hpp"

namespace forte {

inline constexpr int kJointCount = 6;

enum class DhConvention {
  kStandard,  // T = Rz(theta) Tz(d) Tx(a) Rx(alpha); joint i turns about z_{i-1}
  kModified,  // T = Rx(alpha) Tx(a) Rz(theta) Tz(d); joint i turns about z_i
};

// One row of the Denavit-Hartenberg table. Angles in radians, lengths in
// metres. For the modified convention `alpha` and `a` are the proximal
// (i-1) parameters of the row.
struct DhRow {
  double theta_offset = 0.0;
  double alpha = 0.0;
  double a = 0.0;
  double d = 0.0;

  bool operator==(const DhRow&) const = default;
};

struct JointRange {
  double min = 0.0;  // rad
  double max = 0.0;  // rad

  double span() const { return max - min; }
  bool contains(double q) const { return q >= min && q <= max; }
  bool operator==(const JointRange&) const = default;
};

using JointLimits = std::array<JointRange, kJointCount>;

struct TorqueSpeedPoint {
  double rate = 0.0;    // steps/s (commanded driver pulses)
  double torque = 0.0;  // N*m at the motor shaft

  bool operator==(const TorqueSpeedPoint&) const = default;
};

struct MotorSpec {
  std::string name;
  double holding_torque = 0.0;  // N*m
  int steps_per_rev = 200;      // full steps
  std::vector<TorqueSpeedPoint> torque_speed_curve;
  double mass = 0.0;  // kg
  bool provisional = false;

  // Piecewise-linear interpolation, clamped at both ends.
  double torque_at(double step_rate) const;

  bool operator==(const MotorSpec&) const = default;
};

enum class StageKind { kCapstanRotating, kCapstanStationary, kBelt, kGear, kCable };

enum class CapstanMode {
  kRotating,    // output pulley turns about a fixed axis
  kStationary,  // pulley fixed, sheave orbits it
};

// Capstan drum pair. The sheave is the small motor-side drum, the pulley the
// large output drum, independent of which one is fixed.
struct CapstanGeometry {
  double sheave_diameter = 0.0;  // m
  double pulley_diameter = 0.0;  // m
  double cable_thickness = 0.0;  // m
  double tolerance = 0.002;      // m, winding clearance
  CapstanMode mode = CapstanMode::kRotating;
  bool provisional = false;

  bool operator==(const CapstanGeometry&) const = default;
};

struct TransmissionStage {
  StageKind kind = StageKind::kGear;
  double ratio = 1.0;
  std::optional<CapstanGeometry> geometry;  // present iff kind is a capstan

  bool operator==(const TransmissionStage&) const = default;
};

struct JointDrive {
  int joint_index = 0;  // 1..6
  MotorSpec motor;
  std::vector<TransmissionStage> stages;
  int microstep_factor = 1;
  std::string mechanism;  // human label, e.g. "Belt + Capstan"
  // Tabulated max joint torque the drive is expected to reproduce.
  std::optional<double> reference_max_torque;

  bool operator==(const JointDrive&) const = default;
};

// A rigid mass carried by link `link` (0 = base, k = body moved by joints
// 1..k), with its centre of mass given in that link's DH frame.
struct LinkMass {
  std::string name;
  int link = 0;
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  bool provisional = false;

  bool operator==(const LinkMass&) const = default;
};

// Point mass of the motor that drives `joint`, mounted on `link`. Its mass is
// the drive's MotorSpec::mass.
struct MotorPlacement {
  int joint = 0;
  int link = 0;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();

  bool operator==(const MotorPlacement&) const = default;
};

struct MassModel {
  std::vector<LinkMass> links;
  std::vector<MotorPlacement> motors;
  double payload = 0.0;  // kg at the end-effector frame origin
  double gravity = 9.81;
  Eigen::Vector3d gravity_direction{0.0, 0.0, -1.0};

  bool operator==(const MassModel&) const = default;
};

struct ArmDescription {
  std::string name;
  DhConvention convention = DhConvention::kStandard;
  std::array<DhRow, kJointCount> dh{};
  JointLimits limits{};
  std::array<JointDrive, kJointCount> drives{};
  MassModel mass_model;
  std::vector<std::string> notes;

  const JointDrive& drive(int joint) const { return drives.at(joint - 1); }

  // Structural link masses plus every placed motor; payload excluded.
  double total_mass() const;

  bool operator==(const ArmDescription&) const = default;
};

struct Violation {
  std::string code;  // machine-readable, e.g. "limits.min_ge_max"
  std::string type;  // owning domain type, e.g. "JointLimits"
  std::string path;  // field path, e.g. "limits[0]"
  std::string message;
};

struct Notice {
  std::string code;
  std::string path;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

struct LoadedArm {
  ArmDescription arm;
  std::vector<Notice> notices;
};

inline constexpr int kSchemaMajorVersion = 1;

// Every invariant violation of `arm`; empty means valid.
std::vector<Violation> validate_arm(const ArmDescription& arm);

// Advisory notices: provisional placeholder values still in use and
// drives whose computed torque disagrees with their tabulated reference.
std::vector<Notice> collect_notices(const ArmDescription& arm);

LoadedArm parse_arm(std::string_view json_text);
LoadedArm load_arm(const std::filesystem::path& config_path);

std::string serialize_arm(const ArmDescription& arm);
void save_arm(const ArmDescription& arm, const std::filesystem::path& path);

std::string_view to_string(StageKind kind);
std::string_view to_string(DhConvention convention);

}  // namespace forte
