#include "forte/arm_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "forte/drivetrain.hpp"

namespace forte {

namespace {

bool is_capstan(StageKind kind) {
  return kind == StageKind::kCapstanRotating || kind == StageKind::kCapstanStationary;
}

std::string join_codes(const std::vector<Violation>& violations) {
  std::string text = fmt::format("arm description has {} violation(s):", violations.size());
  for (const auto& v : violations) text += fmt::format("\n  [{}] {}: {}", v.code, v.path, v.message);
  return text;
}

class Collector {
 public:
  void add(std::string code, std::string type, std::string path, std::string message) {
    out.push_back({std::move(code), std::move(type), std::move(path), std::move(message)});
  }
  std::vector<Violation> out;
};

void check_motor(const MotorSpec& motor, const std::string& path, Collector& c) {
  if (!(motor.holding_torque > 0.0) || !std::isfinite(motor.holding_torque)) {
    c.add("motor.holding_torque_nonpositive", "MotorSpec", path + ".holding_torque",
          fmt::format("holding torque must be > 0, got {}", motor.holding_torque));
  }
  if (motor.steps_per_rev < 1) {
    c.add("motor.steps_per_rev_invalid", "MotorSpec", path + ".steps_per_rev",
          fmt::format("steps per revolution must be >= 1, got {}", motor.steps_per_rev));
  }
  const auto& curve = motor.torque_speed_curve;
  if (curve.empty()) {
    c.add("motor.curve_empty", "MotorSpec", path + ".torque_speed_curve",
          "torque-speed curve needs at least one point");
    return;
  }
  if (curve.front().rate != 0.0 || curve.front().torque != motor.holding_torque) {
    c.add("motor.curve_origin_mismatch", "MotorSpec", path + ".torque_speed_curve[0]",
          fmt::format("curve must start at (0, holding torque {}), got ({}, {})",
                      motor.holding_torque, curve.front().rate, curve.front().torque));
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].rate <= curve[i - 1].rate) {
      c.add("motor.curve_rate_order", "MotorSpec", fmt::format("{}.torque_speed_curve[{}]", path, i),
            "curve rates must be strictly increasing");
    }
    if (curve[i].torque > curve[i - 1].torque || curve[i].torque < 0.0) {
      c.add("motor.curve_increasing", "MotorSpec", fmt::format("{}.torque_speed_curve[{}]", path, i),
            "available torque must be non-negative and non-increasing with step rate");
    }
  }
}

void check_stage(const TransmissionStage& stage, const std::string& path, Collector& c) {
  if (!(stage.ratio > 0.0) || !std::isfinite(stage.ratio)) {
    c.add("stage.ratio_nonpositive", "TransmissionStage", path + ".ratio",
          fmt::format("ratio must be > 0, got {}", stage.ratio));
  }
  if (!is_capstan(stage.kind)) {
    if (stage.geometry) {
      c.add("stage.geometry_unexpected", "TransmissionStage", path + ".capstan",
            fmt::format("{} stage cannot carry capstan geometry", to_string(stage.kind)));
    }
    return;
  }
  if (!stage.geometry) {
    c.add("stage.geometry_missing", "TransmissionStage", path + ".capstan",
          "capstan stage requires geometry");
    return;
  }
  const auto& g = *stage.geometry;
  const auto expected_mode =
      stage.kind == StageKind::kCapstanStationary ? CapstanMode::kStationary : CapstanMode::kRotating;
  if (g.mode != expected_mode) {
    c.add("stage.mode_mismatch", "TransmissionStage", path + ".capstan",
          "capstan geometry mode does not match the stage kind");
    return;
  }
  try {
    drivetrain::check_geometry(g);
  } catch (const Error& e) {
    c.add("stage.geometry_invalid", "CapstanGeometry", path + ".capstan", e.what());
    return;
  }
  const double from_geometry = drivetrain::capstan_reduction(g);
  if (std::abs(from_geometry - stage.ratio) > 1e-9) {
    c.add("stage.ratio_inconsistent", "TransmissionStage", path + ".ratio",
          fmt::format("ratio {} disagrees with geometry-derived {}", stage.ratio, from_geometry));
  }
}

void check_mass(double mass, const std::string& path, Collector& c) {
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    c.add("mass.negative", "MassModel", path, fmt::format("mass must be finite and >= 0, got {}", mass));
  }
}

}  // namespace

double MotorSpec::torque_at(double step_rate) const {
  const auto& curve = torque_speed_curve;
  if (curve.empty()) return holding_torque;
  if (step_rate <= curve.front().rate) return curve.front().torque;
  if (step_rate >= curve.back().rate) return curve.back().torque;
  auto hi = std::upper_bound(curve.begin(), curve.end(), step_rate,
                             [](double r, const TorqueSpeedPoint& p) { return r < p.rate; });
  auto lo = hi - 1;
  const double t = (step_rate - lo->rate) / (hi->rate - lo->rate);
  return lo->torque + t * (hi->torque - lo->torque);
}

double ArmDescription::total_mass() const {
  double total = 0.0;
  for (const auto& link : mass_model.links) total += link.mass;
  for (const auto& placement : mass_model.motors) {
    if (placement.joint >= 1 && placement.joint <= kJointCount) total += drive(placement.joint).motor.mass;
  }
  return total;
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorCode::kValidation, join_codes(violations)), violations_(std::move(violations)) {}

std::vector<Violation> validate_arm(const ArmDescription& arm) {
  Collector c;

  for (int i = 0; i < kJointCount; ++i) {
    const auto& row = arm.dh[i];
    const auto path = fmt::format("dh.rows[{}]", i);
    if (!std::isfinite(row.theta_offset) || !std::isfinite(row.alpha) || !std::isfinite(row.a) ||
        !std::isfinite(row.d)) {
      c.add("dh.non_finite", "DHRow", path, "DH parameters must be finite");
    } else if (row.a < 0.0 || row.d < 0.0) {
      c.add("dh.length_negative", "DHRow", path,
            fmt::format("link lengths must be non-negative, got a={} d={}", row.a, row.d));
    }
  }

  for (int i = 0; i < kJointCount; ++i) {
    const auto& range = arm.limits[i];
    const auto path = fmt::format("limits[{}]", i);
    if (!std::isfinite(range.min) || !std::isfinite(range.max)) {
      c.add("limits.non_finite", "JointLimits", path, "joint limits must be finite");
    } else if (range.min >= range.max) {
      c.add("limits.min_ge_max", "JointLimits", path,
            fmt::format("J{} min {} rad must be below max {} rad", i + 1, range.min, range.max));
    }
  }

  std::set<int> seen;
  for (int i = 0; i < kJointCount; ++i) {
    const auto& drive = arm.drives[i];
    const auto path = fmt::format("drives[{}]", i);
    if (drive.joint_index < 1 || drive.joint_index > kJointCount) {
      c.add("drive.joint_index_invalid", "JointDrive", path + ".joint",
            fmt::format("joint index must be 1..6, got {}", drive.joint_index));
    } else if (!seen.insert(drive.joint_index).second) {
      c.add("drive.joint_index_duplicate", "ArmDescription", path + ".joint",
            fmt::format("joint {} is driven twice", drive.joint_index));
    } else if (drive.joint_index != i + 1) {
      c.add("drive.joint_index_order", "ArmDescription", path + ".joint",
            fmt::format("drive at position {} is for joint {}", i + 1, drive.joint_index));
    }
    if (drive.microstep_factor < 1) {
      c.add("drive.microstep_invalid", "JointDrive", path + ".microstep",
            fmt::format("microstep factor must be >= 1, got {}", drive.microstep_factor));
    }
    check_motor(drive.motor, path + ".motor", c);
    check_mass(drive.motor.mass, path + ".motor.mass", c);
    for (std::size_t s = 0; s < drive.stages.size(); ++s) {
      check_stage(drive.stages[s], fmt::format("{}.stages[{}]", path, s), c);
    }
  }

  const auto& mm = arm.mass_model;
  for (std::size_t i = 0; i < mm.links.size(); ++i) {
    const auto path = fmt::format("mass_model.links[{}]", i);
    check_mass(mm.links[i].mass, path + ".mass", c);
    if (mm.links[i].link < 0 || mm.links[i].link > kJointCount) {
      c.add("mass.link_invalid", "MassModel", path + ".link",
            fmt::format("link index must be 0..6, got {}", mm.links[i].link));
    }
    if (!mm.links[i].com.allFinite()) {
      c.add("mass.non_finite", "MassModel", path + ".com", "centre of mass must be finite");
    }
  }
  for (std::size_t i = 0; i < mm.motors.size(); ++i) {
    const auto path = fmt::format("mass_model.motors[{}]", i);
    const auto& m = mm.motors[i];
    if (m.joint < 1 || m.joint > kJointCount) {
      c.add("mass.motor_joint_invalid", "MassModel", path + ".joint",
            fmt::format("motor joint must be 1..6, got {}", m.joint));
    }
    if (m.link < 0 || m.link > kJointCount) {
      c.add("mass.link_invalid", "MassModel", path + ".link",
            fmt::format("link index must be 0..6, got {}", m.link));
    }
    if (!m.offset.allFinite()) {
      c.add("mass.non_finite", "MassModel", path + ".offset", "motor offset must be finite");
    }
  }
  check_mass(mm.payload, "mass_model.payload", c);
  if (!(mm.gravity >= 0.0) || !std::isfinite(mm.gravity)) {
    c.add("mass.gravity_invalid", "MassModel", "mass_model.gravity",
          fmt::format("gravity must be finite and >= 0, got {}", mm.gravity));
  }
  if (!mm.gravity_direction.allFinite() || std::abs(mm.gravity_direction.norm() - 1.0) > 1e-9) {
    c.add("mass.gravity_direction_invalid", "MassModel", "mass_model.gravity_direction",
          "gravity direction must be a unit vector");
  }

  return std::move(c.out);
}

std::vector<Notice> collect_notices(const ArmDescription& arm) {
  std::vector<Notice> notices;
  std::set<std::string> motors_seen;
  for (int i = 0; i < kJointCount; ++i) {
    const auto& drive = arm.drives[i];
    const auto path = fmt::format("drives[{}]", i);
    if (drive.motor.provisional && motors_seen.insert(drive.motor.name).second) {
      notices.push_back({"provisional_value", fmt::format("motors.{}", drive.motor.name),
                         fmt::format("motor '{}' still uses placeholder mass/curve values; "
                                     "replace them with the purchased motor's datasheet",
                                     drive.motor.name)});
    }
    for (std::size_t s = 0; s < drive.stages.size(); ++s) {
      const auto& g = drive.stages[s].geometry;
      if (g && g->provisional) {
        notices.push_back({"provisional_value", fmt::format("{}.stages[{}].capstan", path, s),
                           "capstan cable thickness is a placeholder; sheave height and spacing "
                           "depend on it, reduction ratios do not"});
      }
    }
    if (drive.reference_max_torque) {
      const double computed = drivetrain::max_joint_torque(drive);
      if (std::abs(computed - *drive.reference_max_torque) > drivetrain::kTableTolerance) {
        notices.push_back(
            {"table_inconsistency", path + ".reference_max_torque",
             fmt::format("J{}: tabulated max torque {:.6g} N*m but {:.6g} N*m x {:.6g} reduction = {:.6g} N*m; "
                         "the mechanism ratio is kept",
                         drive.joint_index, *drive.reference_max_torque,
                         drive.motor.holding_torque, drivetrain::total_reduction(drive), computed)});
      }
    }
  }
  for (std::size_t i = 0; i < arm.mass_model.links.size(); ++i) {
    const auto& link = arm.mass_model.links[i];
    if (link.provisional) {
      notices.push_back({"provisional_value", fmt::format("mass_model.links[{}]", i),
                         fmt::format("mass '{}' is an estimate, not a measured value", link.name)});
    }
  }
  return notices;
}

std::string_view to_string(StageKind kind) {
  switch (kind) {
    case StageKind::kCapstanRotating: return "capstan_rotating";
    case StageKind::kCapstanStationary: return "capstan_stationary";
    case StageKind::kBelt: return "belt";
    case StageKind::kGear: return "gear";
    case StageKind::kCable: return "cable";
  }
  return "unknown";
}

std::string_view to_string(DhConvention convention) {
  return convention == DhConvention::kStandard ? "standard" : "modified";
}

}  // namespace forte
