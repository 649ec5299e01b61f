// JSON reader/writer for arm description files. The schema is documented in
// docs/arm_schema.md.

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "forte/arm_model.hpp"
#include "forte/drivetrain.hpp"
#include "forte/units.hpp"

namespace forte {

using nlohmann::json;

double parse_angle(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr == begin) {
    throw Error(ErrorCode::kParse, fmt::format("cannot parse angle '{}'", text));
  }
  const auto unit = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
  if (unit.empty() || unit == "rad") return value;
  if (unit == "deg") return deg_to_rad(value);
  throw Error(ErrorCode::kParse,
              fmt::format("unknown angle unit '{}' in '{}' (use 'deg' or 'rad')", unit, text));
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kParse, fmt::format("{}: {}", path, message));
}

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  std::set<std::string_view> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (key == "note" || ok.contains(key)) continue;
    fail(path, fmt::format("unknown key '{}'", key));
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, fmt::format("missing required key '{}'", key));
  return *it;
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  return value.get<double>();
}

int as_int(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path, "expected an integer");
  return value.get<int>();
}

std::string as_string(const json& value, const std::string& path) {
  if (!value.is_string()) fail(path, "expected a string");
  return value.get<std::string>();
}

bool as_bool(const json& value, const std::string& path) {
  if (!value.is_boolean()) fail(path, "expected true or false");
  return value.get<bool>();
}

double as_angle(const json& value, const std::string& path) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    try {
      return parse_angle(value.get<std::string>());
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }
  fail(path, "expected an angle (number in radians or string like \"90 deg\")");
}

Eigen::Vector3d as_vec3(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 3) fail(path, "expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v[i] = as_number(value[i], fmt::format("{}[{}]", path, i));
  return v;
}

const json& as_array(const json& value, const std::string& path, std::size_t expected_size = 0) {
  if (!value.is_array()) fail(path, "expected an array");
  if (expected_size != 0 && value.size() != expected_size) {
    fail(path, fmt::format("expected {} entries, got {}", expected_size, value.size()));
  }
  return value;
}

template <typename T>
T optional_or(const json& obj, const char* key, T fallback,
              T (*convert)(const json&, const std::string&), const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : convert(*it, path + "." + key);
}

StageKind parse_stage_kind(const std::string& text, const std::string& path) {
  static const std::map<std::string, StageKind, std::less<>> kinds{
      {"capstan_rotating", StageKind::kCapstanRotating},
      {"capstan_stationary", StageKind::kCapstanStationary},
      {"belt", StageKind::kBelt},
      {"gear", StageKind::kGear},
      {"cable", StageKind::kCable}};
  auto it = kinds.find(text);
  if (it == kinds.end()) fail(path, fmt::format("unknown stage kind '{}'", text));
  return it->second;
}

void check_schema_version(const json& root) {
  const auto text = as_string(require(root, "schema_version", "$"), "$.schema_version");
  int major = -1;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), major);
  if (ec != std::errc{} || (ptr != text.data() + text.size() && *ptr != '.')) {
    fail("$.schema_version", fmt::format("malformed version '{}'", text));
  }
  if (major != kSchemaMajorVersion) {
    fail("$.schema_version", fmt::format("unsupported schema major version {} (this build reads {})",
                                         major, kSchemaMajorVersion));
  }
}

MotorSpec parse_motor(const std::string& name, const json& obj, const std::string& path) {
  reject_unknown_keys(obj, path, {"holding_torque", "steps_per_rev", "torque_speed_curve", "mass", "provisional"});
  MotorSpec m;
  m.name = name;
  m.holding_torque = as_number(require(obj, "holding_torque", path), path + ".holding_torque");
  m.steps_per_rev = optional_or<int>(obj, "steps_per_rev", 200, as_int, path);
  m.mass = as_number(require(obj, "mass", path), path + ".mass");
  m.provisional = optional_or<bool>(obj, "provisional", false, as_bool, path);
  if (auto it = obj.find("torque_speed_curve"); it != obj.end()) {
    const auto cpath = path + ".torque_speed_curve";
    for (std::size_t i = 0; i < as_array(*it, cpath).size(); ++i) {
      const auto ppath = fmt::format("{}[{}]", cpath, i);
      const auto& point = as_array((*it)[i], ppath, 2);
      m.torque_speed_curve.push_back({as_number(point[0], ppath + "[0]"), as_number(point[1], ppath + "[1]")});
    }
  } else {
    m.torque_speed_curve.push_back({0.0, m.holding_torque});
  }
  return m;
}

CapstanGeometry parse_capstan(const json& obj, StageKind kind, const std::string& path) {
  reject_unknown_keys(obj, path, {"sheave_diameter", "pulley_diameter", "cable_thickness", "tolerance", "provisional"});
  CapstanGeometry g;
  g.sheave_diameter = as_number(require(obj, "sheave_diameter", path), path + ".sheave_diameter");
  g.pulley_diameter = as_number(require(obj, "pulley_diameter", path), path + ".pulley_diameter");
  g.cable_thickness = as_number(require(obj, "cable_thickness", path), path + ".cable_thickness");
  g.tolerance = optional_or<double>(obj, "tolerance", 0.002, as_number, path);
  g.provisional = optional_or<bool>(obj, "provisional", false, as_bool, path);
  g.mode = kind == StageKind::kCapstanStationary ? CapstanMode::kStationary : CapstanMode::kRotating;
  return g;
}

TransmissionStage parse_stage(const json& obj, const std::string& path) {
  reject_unknown_keys(obj, path, {"kind", "ratio", "capstan"});
  TransmissionStage stage;
  stage.kind = parse_stage_kind(as_string(require(obj, "kind", path), path + ".kind"), path + ".kind");
  const bool capstan = stage.kind == StageKind::kCapstanRotating || stage.kind == StageKind::kCapstanStationary;
  if (auto it = obj.find("capstan"); it != obj.end()) {
    stage.geometry = parse_capstan(*it, stage.kind, path + ".capstan");
  }
  if (auto it = obj.find("ratio"); it != obj.end()) {
    stage.ratio = as_number(*it, path + ".ratio");
  } else if (capstan && stage.geometry) {
    try {
      stage.ratio = drivetrain::capstan_reduction(*stage.geometry);
    } catch (const Error&) {
      // Reported by validation as stage.geometry_invalid.
      stage.ratio = std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    fail(path, "missing required key 'ratio'");
  }
  return stage;
}

JointDrive parse_drive(const json& obj, const std::map<std::string, MotorSpec>& motors,
                       const std::string& path) {
  reject_unknown_keys(obj, path, {"joint", "motor", "microstep", "mechanism", "reference_max_torque", "stages"});
  JointDrive drive;
  drive.joint_index = as_int(require(obj, "joint", path), path + ".joint");
  const auto motor_name = as_string(require(obj, "motor", path), path + ".motor");
  auto it = motors.find(motor_name);
  if (it == motors.end()) fail(path + ".motor", fmt::format("no motor named '{}' in 'motors'", motor_name));
  drive.motor = it->second;
  drive.microstep_factor = optional_or<int>(obj, "microstep", 1, as_int, path);
  drive.mechanism = optional_or<std::string>(obj, "mechanism", "", as_string, path);
  if (auto ref = obj.find("reference_max_torque"); ref != obj.end()) {
    drive.reference_max_torque = as_number(*ref, path + ".reference_max_torque");
  }
  const auto& stages = as_array(require(obj, "stages", path), path + ".stages");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    drive.stages.push_back(parse_stage(stages[i], fmt::format("{}.stages[{}]", path, i)));
  }
  return drive;
}

MassModel parse_mass_model(const json& obj, const std::string& path) {
  reject_unknown_keys(obj, path, {"gravity", "gravity_direction", "payload", "links", "motors"});
  MassModel mm;
  mm.gravity = optional_or<double>(obj, "gravity", 9.81, as_number, path);
  mm.payload = optional_or<double>(obj, "payload", 0.0, as_number, path);
  if (auto it = obj.find("gravity_direction"); it != obj.end()) {
    mm.gravity_direction = as_vec3(*it, path + ".gravity_direction");
  }
  if (auto it = obj.find("links"); it != obj.end()) {
    const auto lpath = path + ".links";
    for (std::size_t i = 0; i < as_array(*it, lpath).size(); ++i) {
      const auto& l = (*it)[i];
      const auto p = fmt::format("{}[{}]", lpath, i);
      reject_unknown_keys(l, p, {"name", "link", "mass", "com", "provisional"});
      LinkMass link;
      link.name = optional_or<std::string>(l, "name", "", as_string, p);
      link.link = as_int(require(l, "link", p), p + ".link");
      link.mass = as_number(require(l, "mass", p), p + ".mass");
      if (auto com = l.find("com"); com != l.end()) link.com = as_vec3(*com, p + ".com");
      link.provisional = optional_or<bool>(l, "provisional", false, as_bool, p);
      mm.links.push_back(std::move(link));
    }
  }
  if (auto it = obj.find("motors"); it != obj.end()) {
    const auto mpath = path + ".motors";
    for (std::size_t i = 0; i < as_array(*it, mpath).size(); ++i) {
      const auto& m = (*it)[i];
      const auto p = fmt::format("{}[{}]", mpath, i);
      reject_unknown_keys(m, p, {"joint", "link", "offset"});
      MotorPlacement placement;
      placement.joint = as_int(require(m, "joint", p), p + ".joint");
      placement.link = as_int(require(m, "link", p), p + ".link");
      if (auto off = m.find("offset"); off != m.end()) placement.offset = as_vec3(*off, p + ".offset");
      mm.motors.push_back(placement);
    }
  }
  return mm;
}

ArmDescription parse_description(const json& root) {
  if (!root.is_object()) fail("$", "expected a JSON object");
  reject_unknown_keys(root, "$", {"schema_version", "name", "notes", "dh", "limits", "motors", "drives", "mass_model"});
  check_schema_version(root);

  ArmDescription arm;
  arm.name = optional_or<std::string>(root, "name", "", as_string, "$");
  if (auto it = root.find("notes"); it != root.end()) {
    for (std::size_t i = 0; i < as_array(*it, "$.notes").size(); ++i) {
      arm.notes.push_back(as_string((*it)[i], fmt::format("$.notes[{}]", i)));
    }
  }

  const auto& dh = require(root, "dh", "$");
  reject_unknown_keys(dh, "$.dh", {"convention", "rows"});
  const auto convention = as_string(require(dh, "convention", "$.dh"), "$.dh.convention");
  if (convention == "standard") {
    arm.convention = DhConvention::kStandard;
  } else if (convention == "modified") {
    arm.convention = DhConvention::kModified;
  } else {
    fail("$.dh.convention", fmt::format("expected 'standard' or 'modified', got '{}'", convention));
  }
  const auto& rows = as_array(require(dh, "rows", "$.dh"), "$.dh.rows", kJointCount);
  for (int i = 0; i < kJointCount; ++i) {
    const auto p = fmt::format("$.dh.rows[{}]", i);
    const auto& r = rows[i];
    reject_unknown_keys(r, p, {"theta_offset", "alpha", "a", "d"});
    auto& row = arm.dh[i];
    row.theta_offset = r.contains("theta_offset") ? as_angle(r["theta_offset"], p + ".theta_offset") : 0.0;
    row.alpha = as_angle(require(r, "alpha", p), p + ".alpha");
    row.a = as_number(require(r, "a", p), p + ".a");
    row.d = as_number(require(r, "d", p), p + ".d");
  }

  const auto& limits = as_array(require(root, "limits", "$"), "$.limits", kJointCount);
  for (int i = 0; i < kJointCount; ++i) {
    const auto p = fmt::format("$.limits[{}]", i);
    reject_unknown_keys(limits[i], p, {"min", "max"});
    arm.limits[i].min = as_angle(require(limits[i], "min", p), p + ".min");
    arm.limits[i].max = as_angle(require(limits[i], "max", p), p + ".max");
  }

  std::map<std::string, MotorSpec> motors;
  const auto& motor_obj = require(root, "motors", "$");
  if (!motor_obj.is_object()) fail("$.motors", "expected an object keyed by motor name");
  for (const auto& [name, spec] : motor_obj.items()) {
    if (name == "note") continue;
    motors.emplace(name, parse_motor(name, spec, "$.motors." + name));
  }

  const auto& drives = as_array(require(root, "drives", "$"), "$.drives", kJointCount);
  for (int i = 0; i < kJointCount; ++i) {
    arm.drives[i] = parse_drive(drives[i], motors, fmt::format("$.drives[{}]", i));
  }

  arm.mass_model = parse_mass_model(require(root, "mass_model", "$"), "$.mass_model");
  return arm;
}

json vec3_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

LoadedArm parse_arm(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, fmt::format("malformed arm description: {}", e.what()));
  }
  LoadedArm loaded{parse_description(root), {}};
  if (auto violations = validate_arm(loaded.arm); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  loaded.notices = collect_notices(loaded.arm);
  return loaded;
}

LoadedArm load_arm(const std::filesystem::path& config_path) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open arm description '{}'", config_path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_arm(buffer.str());
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", config_path.string(), e.what()));
  }
}

std::string serialize_arm(const ArmDescription& arm) {
  json root = json::object();
  root["schema_version"] = fmt::format("{}.0", kSchemaMajorVersion);
  root["name"] = arm.name;
  if (!arm.notes.empty()) root["notes"] = arm.notes;

  json rows = json::array();
  for (const auto& r : arm.dh) {
    rows.push_back({{"theta_offset", r.theta_offset}, {"alpha", r.alpha}, {"a", r.a}, {"d", r.d}});
  }
  root["dh"] = {{"convention", std::string(to_string(arm.convention))}, {"rows", rows}};

  json limits = json::array();
  for (const auto& l : arm.limits) limits.push_back({{"min", l.min}, {"max", l.max}});
  root["limits"] = limits;

  json motors = json::object();
  json drives = json::array();
  for (const auto& d : arm.drives) {
    json curve = json::array();
    for (const auto& p : d.motor.torque_speed_curve) curve.push_back(json::array({p.rate, p.torque}));
    json motor = {{"holding_torque", d.motor.holding_torque},
                  {"steps_per_rev", d.motor.steps_per_rev},
                  {"torque_speed_curve", curve},
                  {"mass", d.motor.mass}};
    if (d.motor.provisional) motor["provisional"] = true;
    if (motors.contains(d.motor.name) && motors[d.motor.name] != motor) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("two different motors share the name '{}'", d.motor.name));
    }
    motors[d.motor.name] = motor;

    json stages = json::array();
    for (const auto& s : d.stages) {
      json stage = {{"kind", std::string(to_string(s.kind))}, {"ratio", s.ratio}};
      if (s.geometry) {
        stage["capstan"] = {{"sheave_diameter", s.geometry->sheave_diameter},
                            {"pulley_diameter", s.geometry->pulley_diameter},
                            {"cable_thickness", s.geometry->cable_thickness},
                            {"tolerance", s.geometry->tolerance}};
        if (s.geometry->provisional) stage["capstan"]["provisional"] = true;
      }
      stages.push_back(stage);
    }
    json drive = {{"joint", d.joint_index},
                  {"motor", d.motor.name},
                  {"microstep", d.microstep_factor},
                  {"mechanism", d.mechanism},
                  {"stages", stages}};
    if (d.reference_max_torque) drive["reference_max_torque"] = *d.reference_max_torque;
    drives.push_back(drive);
  }
  root["motors"] = motors;
  root["drives"] = drives;

  const auto& mm = arm.mass_model;
  json links = json::array();
  for (const auto& l : mm.links) {
    json link = {{"name", l.name}, {"link", l.link}, {"mass", l.mass}, {"com", vec3_json(l.com)}};
    if (l.provisional) link["provisional"] = true;
    links.push_back(link);
  }
  json placements = json::array();
  for (const auto& m : mm.motors) {
    placements.push_back({{"joint", m.joint}, {"link", m.link}, {"offset", vec3_json(m.offset)}});
  }
  root["mass_model"] = {{"gravity", mm.gravity},
                        {"gravity_direction", vec3_json(mm.gravity_direction)},
                        {"payload", mm.payload},
                        {"links", links},
                        {"motors", placements}};
  return root.dump(2) + "\n";
}

void save_arm(const ArmDescription& arm, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << serialize_arm(arm);
}

}  // namespace forte
