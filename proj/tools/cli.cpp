#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "forte/arm_model.hpp"
#include "forte/bom.hpp"
#include "forte/drivetrain.hpp"
#include "forte/kinematics.hpp"
#include "forte/prototype.hpp"
#include "forte/statics.hpp"
#include "forte/stepper_sim.hpp"
#include "forte/svg.hpp"
#include "forte/units.hpp"
#include "forte/version.hpp"
#include "forte/workspace.hpp"

namespace forte::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string arm = "default";
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "text";
  unsigned threads = 0;
  bool quiet = false;
};

struct Rendered {
  std::string body;
  std::string extension;
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("{}: '{}' is not a number", flag, item));
    }
  }
  if (expected != 0 && values.size() != expected) {
    throw UsageError(fmt::format("{}: expected {} comma-separated values, got {}", flag, expected, values.size()));
  }
  if (values.empty()) throw UsageError(fmt::format("{}: no values given", flag));
  return values;
}

JointVector parse_joints_deg(const std::string& text, const char* flag) {
  const auto v = parse_list(text, kJointCount, flag);
  JointVector q;
  for (int i = 0; i < kJointCount; ++i) q[i] = deg_to_rad(v[i]);
  return q;
}

std::string joints_deg(const JointVector& q) {
  std::string s;
  for (int i = 0; i < kJointCount; ++i) s += fmt::format("{}{:.4g}", i ? ", " : "", rad_to_deg(q[i]));
  return s;
}

// Hides rounding residue such as -1e-17 in fixed-point text output.
double tidy(double v) { return std::abs(v) < 5e-13 ? 0.0 : v; }

std::string g10(double v) { return fmt::format("{:.10g}", v); }

void require_format(const Common& c, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (c.format == f) return;
  }
  std::string list;
  for (const char* f : allowed) list += fmt::format("{}{}", list.empty() ? "" : ", ", f);
  throw UsageError(fmt::format("--format {} is not available here (choose {})", c.format, list));
}

fs::path first_existing(const std::vector<fs::path>& candidates) {
  for (const auto& p : candidates) {
    if (fs::exists(p)) return p;
  }
  return candidates.front();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

// State shared by every subcommand handler.
class Session {
 public:
  Session(Common& common, std::ostream& err) : common_(common), err_(err) {}

  const ArmDescription& arm() {
    if (!arm_) {
      arm_path_ = resolve_arm_path(common_.arm);
      auto loaded = load_arm(arm_path_);
      if (!common_.quiet) {
        for (const auto& n : loaded.notices) err_ << fmt::format("notice [{}] {}: {}\n", n.code, n.path, n.message);
      }
      arm_ = std::move(loaded.arm);
    }
    return *arm_;
  }

  bool arm_loaded() const { return arm_.has_value(); }
  const fs::path& arm_path() const { return arm_path_; }
  const Common& common() const { return common_; }
  std::vector<fs::path> inputs;  // extra files whose hashes go in the manifest

 private:
  Common& common_;
  std::ostream& err_;
  std::optional<ArmDescription> arm_;
  fs::path arm_path_;
};

// ---------------------------------------------------------------- kinematics

Rendered cmd_fk(Session& s, const std::string& q_text) {
  require_format(s.common(), {"text", "csv"});
  const JointVector q = parse_joints_deg(q_text, "--q");
  const Pose p = forward_kinematics(s.arm(), q);
  const auto& r = p.orientation;
  if (s.common().format == "csv") {
    std::string out = "q1_deg,q2_deg,q3_deg,q4_deg,q5_deg,q6_deg,x_m,y_m,z_m,r11,r12,r13,r21,r22,r23,r31,r32,r33\n";
    for (int i = 0; i < kJointCount; ++i) out += g10(rad_to_deg(q[i])) + ",";
    out += fmt::format("{:.12g},{:.12g},{:.12g}", p.position.x(), p.position.y(), p.position.z());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out += fmt::format(",{:.12g}", r(i, j));
    return {out + "\n", "csv"};
  }
  std::string out = fmt::format("joint angles [deg]: {}\n", joints_deg(q));
  out += fmt::format("position [m]: x = {:.9f}  y = {:.9f}  z = {:.9f}\n", tidy(p.position.x()),
                     tidy(p.position.y()), tidy(p.position.z()));
  out += fmt::format("distance from base origin [m]: {:.9f}\n", p.position.norm());
  out += "orientation:\n";
  for (int i = 0; i < 3; ++i) out += fmt::format("  [{:12.9f} {:12.9f} {:12.9f}]\n", tidy(r(i, 0)), tidy(r(i, 1)), tidy(r(i, 2)));
  return {out, "txt"};
}

Eigen::Matrix3d rpy_deg(const std::vector<double>& rpy) {
  return (Eigen::AngleAxisd(deg_to_rad(rpy[2]), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(deg_to_rad(rpy[1]), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(deg_to_rad(rpy[0]), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

struct IkArgs {
  std::string xyz, rpy, target_q, seed_q = "0,0,0,0,0,0";
  IkOptions options;
};

Rendered cmd_ik(Session& s, const IkArgs& a) {
  require_format(s.common(), {"text", "csv"});
  const auto& arm = s.arm();
  const JointVector seed = parse_joints_deg(a.seed_q, "--seed-q");
  Pose target;
  if (!a.target_q.empty()) {
    if (!a.xyz.empty() || !a.rpy.empty()) throw UsageError("--target-q cannot be combined with --xyz/--rpy");
    target = forward_kinematics(arm, parse_joints_deg(a.target_q, "--target-q"));
  } else {
    if (a.xyz.empty()) throw UsageError("give the target as --xyz (and optionally --rpy) or --target-q");
    const auto xyz = parse_list(a.xyz, 3, "--xyz");
    target.position = {xyz[0], xyz[1], xyz[2]};
    target.orientation = a.rpy.empty() ? forward_kinematics(arm, seed).orientation
                                       : rpy_deg(parse_list(a.rpy, 3, "--rpy"));
  }
  const IkResult r = inverse_kinematics(arm, target, seed, a.options);
  if (s.common().format == "csv") {
    std::string out = "q1_deg,q2_deg,q3_deg,q4_deg,q5_deg,q6_deg,iterations,position_error_m,orientation_error_rad\n";
    for (int i = 0; i < kJointCount; ++i) out += g10(rad_to_deg(r.q[i])) + ",";
    out += fmt::format("{},{:.3e},{:.3e}\n", r.iterations, r.position_error, r.orientation_error);
    return {out, "csv"};
  }
  std::string out = fmt::format("target position [m]: {:.6f} {:.6f} {:.6f}\n", target.position.x(),
                                target.position.y(), target.position.z());
  out += fmt::format("solution [deg]: {}\n", joints_deg(r.q));
  out += fmt::format("iterations: {}\nresidual: {:.3e} m, {:.3e} rad\n", r.iterations, r.position_error,
                     r.orientation_error);
  return {out, "txt"};
}

Rendered cmd_jacobian(Session& s, const std::string& q_text) {
  require_format(s.common(), {"text", "csv"});
  const JointVector q = parse_joints_deg(q_text, "--q");
  const Jacobian j = jacobian(s.arm(), q);
  static constexpr const char* kRows[] = {"vx [m/rad]", "vy [m/rad]", "vz [m/rad]",
                                          "wx [rad/rad]", "wy [rad/rad]", "wz [rad/rad]"};
  std::string out;
  if (s.common().format == "csv") {
    out = "row,j1,j2,j3,j4,j5,j6\n";
    for (int r = 0; r < 6; ++r) {
      out += kRows[r];
      for (int c = 0; c < kJointCount; ++c) out += fmt::format(",{:.12g}", j(r, c));
      out += "\n";
    }
    return {out, "csv"};
  }
  out = fmt::format("geometric Jacobian at q = ({}) deg\n", joints_deg(q));
  out += fmt::format("{:>14}", "");
  for (int c = 1; c <= kJointCount; ++c) out += fmt::format("{:>11}", fmt::format("J{}", c));
  out += "\n";
  for (int r = 0; r < 6; ++r) {
    out += fmt::format("{:>14}", kRows[r]);
    for (int c = 0; c < kJointCount; ++c) out += fmt::format("{:11.6f}", tidy(j(r, c)));
    out += "\n";
  }
  return {out, "txt"};
}

// ----------------------------------------------------------------- workspace

struct WorkspaceArgs {
  std::string steps;
  std::size_t halton = 0;
  std::size_t max_samples = 50'000'000;
  double band = 0.98;
};

WorkspaceOptions workspace_options(const Session& s, const WorkspaceArgs& a, std::array<int, kJointCount> fallback) {
  WorkspaceOptions o;
  o.threads = s.common().threads;
  o.seed = s.common().seed;
  o.max_samples = a.max_samples;
  if (a.halton > 0) {
    if (!a.steps.empty()) throw UsageError("--steps and --halton are mutually exclusive");
    o.mode = SamplingMode::kHalton;
    o.samples = a.halton;
  } else {
    o.steps = fallback;
    if (!a.steps.empty()) {
      const auto v = parse_list(a.steps, kJointCount, "--steps");
      for (int i = 0; i < kJointCount; ++i) {
        if (v[i] != std::floor(v[i])) throw UsageError("--steps takes whole numbers");
        o.steps[i] = static_cast<int>(v[i]);
      }
    }
  }
  return o;
}

std::string describe_sampling(const WorkspaceCloud& cloud) {
  if (cloud.mode == SamplingMode::kHalton) {
    return fmt::format("{} scrambled Halton samples (seed {})", cloud.points.size(), cloud.seed);
  }
  return fmt::format("{} grid samples ({}x{}x{}x{}x{}x{})", cloud.points.size(), cloud.steps[0], cloud.steps[1],
                     cloud.steps[2], cloud.steps[3], cloud.steps[4], cloud.steps[5]);
}

Rendered cmd_workspace(Session& s, const WorkspaceArgs& a) {
  require_format(s.common(), {"text", "csv", "svg"});
  const auto cloud = sample_workspace(s.arm(), workspace_options(s, a, {25, 25, 25, 5, 5, 5}));
  if (s.common().format == "csv") {
    std::ostringstream os;
    write_cloud_csv(cloud, os);
    return {os.str(), "csv"};
  }
  if (s.common().format == "svg") return {svg::workspace_projections(cloud), "svg"};
  const Reach r = max_reach(cloud);
  const double zmin = min_height(cloud);
  std::string out = fmt::format("sampling: {}\n", describe_sampling(cloud));
  out += fmt::format("horizontal reach: {:.2f} mm\n", r.horizontal * 1e3);
  out += fmt::format("euclidean reach: {:.2f} mm\n", r.euclidean * 1e3);
  out += fmt::format("azimuth span, outer {:.0f}% band: {:.2f} deg\n", a.band * 100.0,
                     azimuth_span_deg(cloud, a.band));
  out += fmt::format("azimuth span, all points: {:.2f} deg\n", azimuth_span_deg(cloud, 0.0));
  out += fmt::format("lowest point: z = {:.2f} mm ({} the base plane)\n", zmin * 1e3,
                     zmin < 0.0 ? "below" : "not below");
  return {out, "txt"};
}

Rendered cmd_reach(Session& s, const WorkspaceArgs& a) {
  require_format(s.common(), {"text", "csv"});
  const auto& arm = s.arm();
  const auto cloud = sample_workspace(arm, workspace_options(s, a, {11, 41, 41, 5, 5, 5}));
  const Reach r = max_reach(cloud);
  const double links = link_length_sum(arm);
  const double quoted = prototype::kQuotedReach;
  if (s.common().format == "csv") {
    std::string out = "metric,value_m\n";
    out += fmt::format("horizontal_reach,{:.9f}\n", r.horizontal);
    out += fmt::format("euclidean_reach,{:.9f}\n", r.euclidean);
    out += fmt::format("link_length_sum,{:.9f}\n", links);
    out += fmt::format("quoted_reach,{:.9f}\n", quoted);
    return {out, "csv"};
  }
  std::string out = fmt::format("sampling: {}\n", describe_sampling(cloud));
  out += fmt::format("horizontal reach (max radius about base z): {:.2f} mm ({:+.2f}% vs quoted {:.0f} mm)\n",
                     r.horizontal * 1e3, (r.horizontal / quoted - 1.0) * 100.0, quoted * 1e3);
  out += fmt::format("euclidean reach (max distance from base origin): {:.2f} mm ({:+.2f}% vs quoted)\n",
                     r.euclidean * 1e3, (r.euclidean / quoted - 1.0) * 100.0);
  out += fmt::format("colinear link-length sum past the shoulder: {:.2f} mm ({:+.2f} mm vs quoted)\n", links * 1e3,
                     (links - quoted) * 1e3);
  out += "the quoted figure does not say which metric it uses; all three are shown\n";
  return {out, "txt"};
}

// ---------------------------------------------------------------- drivetrain

struct CapstanArgs {
  double small = 19.4, large = 155.2, cable = 1.0, tolerance = 2.0, range = 360.0;
  std::string mode = "rotating";
};

Rendered cmd_capstan(Session& s, const CapstanArgs& a) {
  require_format(s.common(), {"text", "csv"});
  CapstanGeometry g;
  g.sheave_diameter = a.small * 1e-3;
  g.pulley_diameter = a.large * 1e-3;
  g.cable_thickness = a.cable * 1e-3;
  g.tolerance = a.tolerance * 1e-3;
  g.mode = a.mode == "stationary" ? CapstanMode::kStationary : CapstanMode::kRotating;
  const double gamma = drivetrain::capstan_reduction(g);
  const double h = drivetrain::sheave_height(g, gamma);
  const double sp = drivetrain::sheave_spacing(g.cable_thickness);
  const double w = drivetrain::windings_required(gamma, a.range);
  if (s.common().format == "csv") {
    return {fmt::format("mode,small_mm,large_mm,cable_mm,tolerance_mm,range_deg,ratio,sheave_height_mm,"
                        "sheave_spacing_mm,windings\n{},{},{},{},{},{},{:.12g},{:.12g},{:.12g},{:.12g}\n",
                        a.mode, a.small, a.large, a.cable, a.tolerance, a.range, gamma, h * 1e3, sp * 1e3, w),
            "csv"};
  }
  std::string out = fmt::format("{} capstan, sheave {} mm, pulley {} mm\n", a.mode, a.small, a.large);
  out += fmt::format("reduction ratio: {:.10g}\n", gamma);
  out += fmt::format("sheave height (t = {} mm, delta = {} mm): {:.4g} mm\n", a.cable, a.tolerance, h * 1e3);
  out += fmt::format("sheave spacing: {:.4g} mm\n", sp * 1e3);
  out += fmt::format("windings for {} deg of output: {:.6g}\n", a.range, w);
  return {out, "txt"};
}

Rendered cmd_torque_table(Session& s) {
  require_format(s.common(), {"text", "csv"});
  const auto rows = drivetrain::torque_table(s.arm());
  std::string out;
  if (s.common().format == "csv") {
    out = "joint,motor,holding_torque_nm,mechanism,total_reduction,max_joint_torque_nm,reference_max_torque_nm,"
          "annotation\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const auto& ref = s.arm().drives[i].reference_max_torque;
      out += fmt::format("{},{},{:.10g},{},{:.10g},{:.10g},{},{}\n", r.joint_index, r.motor, r.holding_torque,
                         r.mechanism, r.total_reduction, r.max_joint_torque, ref ? g10(*ref) : "",
                         r.annotation ? r.annotation->code : "");
    }
    return {out, "csv"};
  }
  out = fmt::format("{:<6}{:<10}{:>14}  {:<20}{:>10}{:>18}\n", "Joint", "Motor", "Holding [Nm]", "Mechanism",
                    "Reduction", "Max torque [Nm]");
  std::string notes;
  for (const auto& r : rows) {
    out += fmt::format("{:<6}{:<10}{:>14.5g}  {:<20}{:>10.5g}{:>18.5g}\n", r.joint_index, r.motor,
                       r.holding_torque, r.mechanism, r.total_reduction, r.max_joint_torque);
    if (r.annotation) notes += fmt::format("J{} {}: {}\n", r.joint_index, r.annotation->code, r.annotation->message);
  }
  return {out + notes, "txt"};
}

Rendered cmd_resolution(Session& s, int joint, int microstep) {
  require_format(s.common(), {"text", "csv"});
  const bool csv = s.common().format == "csv";
  std::string out = csv ? "joint,steps_per_rev,microstep,total_reduction,deg_per_microstep\n"
                        : fmt::format("{:<6}{:>10}{:>11}{:>11}{:>20}\n", "Joint", "Steps/rev", "Microstep",
                                      "Reduction", "Output [deg/ustep]");
  for (int j = 1; j <= kJointCount; ++j) {
    if (joint != 0 && j != joint) continue;
    JointDrive d = s.arm().drive(j);
    if (microstep > 0) d.microstep_factor = microstep;
    const double res = drivetrain::joint_resolution_deg(d);
    out += csv ? fmt::format("{},{},{},{:.10g},{:.10g}\n", j, d.motor.steps_per_rev, d.microstep_factor,
                             drivetrain::total_reduction(d), res)
               : fmt::format("{:<6}{:>10}{:>11}{:>11.5g}{:>20.6g}\n", j, d.motor.steps_per_rev, d.microstep_factor,
                             drivetrain::total_reduction(d), res);
  }
  return {out, csv ? "csv" : "txt"};
}

// ------------------------------------------------------------------- statics

struct PayloadArgs {
  std::string policy = "sweep";
  std::string q = "0,0,0,0,0,0";
  double step = 15.0;
  double payload = 0.0;
  double tolerance = kPayloadTolerance;
};

Rendered cmd_payload(Session& s, const PayloadArgs& a) {
  require_format(s.common(), {"text", "csv"});
  const auto& arm = s.arm();
  PosePolicy policy;
  policy.kind = a.policy == "fixed" ? PosePolicy::Kind::kFixed : PosePolicy::Kind::kWorstCaseSweep;
  policy.q = parse_joints_deg(a.q, "--q");
  policy.step = deg_to_rad(a.step);
  policy.threads = s.common().threads;

  if (s.common().format == "csv") {
    std::string out = "q1_deg,q2_deg,q3_deg,q4_deg,q5_deg,q6_deg";
    for (int j = 1; j <= kJointCount; ++j) out += fmt::format(",capacity_j{}_kg", j);
    out += "\n";
    for (const auto& l : pose_loads(arm, policy)) {
      for (int i = 0; i < kJointCount; ++i) out += fmt::format("{}{:.6g}", i ? "," : "", rad_to_deg(l.q[i]));
      for (double c : l.capacity) out += std::isinf(c) ? ",inf" : fmt::format(",{:.9g}", c);
      out += "\n";
    }
    return {out, "csv"};
  }

  const auto report = static_report(arm, policy.q, a.payload);
  std::string out = fmt::format("static load at q = ({}) deg, payload {:.4g} kg\n", joints_deg(policy.q), a.payload);
  out += fmt::format("{:<6}{:>16}{:>17}{:>13}\n", "Joint", "Required [Nm]", "Available [Nm]", "Utilization");
  for (int i = 0; i < kJointCount; ++i) {
    out += fmt::format("{:<6}{:>16.5f}{:>17.5f}{:>13.4f}\n", i + 1, report.required[i], report.available[i],
                       report.utilization[i]);
  }
  out += fmt::format("limiting joint: J{}\n\n", report.limiting_joint);

  const auto r = max_payload(arm, policy, a.tolerance);
  if (policy.kind == PosePolicy::Kind::kFixed) {
    out += "max payload at the fixed pose";
  } else {
    std::string swept;
    for (int j = 0; j < kJointCount; ++j) {
      if (policy.swept[j]) swept += fmt::format("{}J{}", swept.empty() ? "" : ", ", j + 1);
    }
    out += fmt::format("max payload, worst case over {} in {:g} deg steps ({} poses)", swept, a.step, r.poses);
  }
  out += fmt::format(": {:.4f} kg\n", r.payload);
  if (r.structure_overloaded) out += "the arm cannot hold its own weight at some pose\n";
  out += fmt::format("limiting joint: J{} at q = ({}) deg, utilization {:.5f}\n", r.limiting_joint,
                     joints_deg(r.limiting_pose), r.limiting_utilization);
  out += "worst-case capacity per joint [kg]:";
  for (int j = 0; j < kJointCount; ++j) {
    const double c = r.joint_capacity[j];
    out += std::isinf(c) ? fmt::format(" J{} unlimited", j + 1) : fmt::format(" J{} {:.4f}", j + 1, c);
  }
  out += fmt::format("\nquoted theoretical payload: {} kg; measured on hardware: {} kg (not a statics target)\n",
                     prototype::kQuotedTheoreticalPayload, prototype::kMeasuredPayload);
  return {out, "txt"};
}

// --------------------------------------------------------------- stepper-sim

struct RepeatArgs {
  std::string speeds = "500,1000,1500,2000,2500";
  int cycles = prototype::kCyclesPerSpeed;
  std::optional<double> sigma0_mm;
  std::optional<double> slope_mm;
  double payload = 0.0;
  std::string probe = "axis";
  bool no_missed_steps = false;
};

Rendered cmd_repeat(Session& s, const RepeatArgs& a) {
  require_format(s.common(), {"text", "csv", "svg"});
  const auto& arm = s.arm();
  const auto speeds = parse_list(a.speeds, 0, "--speeds");
  if (a.sigma0_mm.has_value() != a.slope_mm.has_value()) {
    throw UsageError("--sigma0 and --slope must be given together");
  }
  NoiseModel noise;
  if (a.sigma0_mm) {
    noise.sigma0 = *a.sigma0_mm * 1e-3;
    noise.slope = *a.slope_mm * 1e-3;
  } else {
    noise = calibrate_noise({prototype::kRepeatabilityAnchors.begin(), prototype::kRepeatabilityAnchors.end()});
  }
  noise.probe = a.probe == "norm" ? ProbeMode::kNorm : ProbeMode::kAxis;
  noise.missed_steps = !a.no_missed_steps;
  auto options = default_experiment();
  options.payload = a.payload;
  options.threads = s.common().threads;
  const auto r = repeatability_experiment(arm, speeds, a.cycles, noise, s.common().seed, options);

  if (s.common().format == "csv") {
    std::string out = "speed_steps_per_s,cycle,deviation_mm\n";
    for (const auto& sp : r.speeds) {
      for (std::size_t c = 0; c < sp.deviations.size(); ++c) {
        out += fmt::format("{:g},{},{:.9f}\n", sp.rate, c, sp.deviations[c] * 1e3);
      }
    }
    return {out, "csv"};
  }
  if (s.common().format == "svg") {
    std::vector<svg::BoxSeries> series;
    for (const auto& sp : r.speeds) {
      svg::BoxSeries b{fmt::format("{:g}", sp.rate), {}};
      for (double d : sp.deviations) b.values.push_back(d * 1e3);
      series.push_back(std::move(b));
    }
    return {svg::box_plot(series, fmt::format("Simulated repeatability, seed {}", r.seed), "deviation [mm]"),
            "svg"};
  }
  std::string out = fmt::format("noise: sigma0 = {:.5g} mm, slope = {:.5g} mm per step/s{}\n", noise.sigma0 * 1e3,
                                noise.slope * 1e3, a.sigma0_mm ? "" : " (fitted to the prototype anchors)");
  out += fmt::format("probe: {}, payload {:g} kg, seed {}\n",
                     noise.probe == ProbeMode::kAxis ? "vertical dial axis" : "3D norm", a.payload, r.seed);
  out += fmt::format("{:>16}{:>8}{:>12}{:>11}{:>14}\n", "rate [steps/s]", "cycles", "mean [mm]", "std [mm]",
                     "missed steps");
  for (const auto& sp : r.speeds) {
    out += fmt::format("{:>16g}{:>8}{:>12.4f}{:>11.4f}{:>14}\n", sp.rate, sp.deviations.size(), sp.mean * 1e3,
                       sp.stddev * 1e3, sp.missed_steps);
  }
  out += fmt::format("mean |deviation|: {:.4f} mm, mean std: {:.4f} mm\n", r.grand_mean * 1e3, r.mean_stddev * 1e3);
  if (!a.sigma0_mm) {
    out += "the noise model is fitted to the prototype's measured stds, so agreement with them is by construction\n";
  }
  return {out, "txt"};
}

// ----------------------------------------------------------------------- bom

struct BomArgs {
  std::string file;
  int batch = 0;
  double grams = prototype::kFilamentPerArm;
  double spool = prototype::kSpoolMass;
  std::string cables = "1100,700,400";
};

Rendered cmd_bom(Session& s, const BomArgs& a) {
  require_format(s.common(), {"text", "csv"});
  const fs::path path = a.file.empty() ? default_bom_path() : fs::path(a.file);
  s.inputs.push_back(path);
  auto b = bom::load_bom(path);
  if (a.batch > 0) b.batch_size = a.batch;
  const auto total = bom::batch_total(b);
  const auto per_arm = bom::per_arm_cost(b);

  if (s.common().format == "csv") {
    std::string out = "category,item,quantity,unit_usd,total_usd\n";
    auto quote = [](const std::string& f) {
      return f.find_first_of(",\"") == std::string::npos ? f : "\"" + f + "\"";
    };
    for (const auto& l : b.lines) {
      const auto qty = bom::format_decimal(l.quantity);
      out += fmt::format("{},{},{},{},{}\n", quote(l.category), quote(l.item), qty, bom::format_money(l.unit_cost),
                         bom::format_money(l.line_total));
    }
    out += fmt::format("total,batch of {},,,{}\n", b.batch_size, bom::format_money(total));
    out += fmt::format("total,per arm,,,{}\n", bom::format_money(per_arm));
    return {out, "csv"};
  }

  std::string out = fmt::format("{:<28}{:>16}\n", "Category", "Subtotal [USD]");
  for (const auto& [cat, sub] : bom::category_subtotals(b)) {
    out += fmt::format("{:<28}{:>16}\n", cat, bom::format_money(sub));
  }
  out += fmt::format("\nbatch total ({} arms): {} USD\n", b.batch_size, bom::format_money(total));
  out += fmt::format("per arm: {} USD{}\n", bom::format_money(per_arm),
                     bom::per_arm_exact(b) ? "" : " (rounded to the micro-dollar)");

  const auto spools = bom::filament_spools(a.grams, b.batch_size, a.spool);
  out += fmt::format("\nfilament: {:g} g x {} = {:.2f} g -> {} spools of {:g} g", a.grams, b.batch_size,
                     a.grams * b.batch_size, spools, a.spool);
  if (const auto* line = bom::find_line(b, "spool")) {
    const double listed = line->quantity.to_double();
    out += listed == static_cast<double>(spools)
               ? "; matches the file\n"
               : fmt::format("; the file lists {:g} ({:+g})\n", listed, listed - static_cast<double>(spools));
  } else {
    out += "\n";
  }
  const auto lengths = parse_list(a.cables, 0, "--cables");
  const auto cable = bom::cable_budget(lengths, b.batch_size);
  out += fmt::format("cable: {:g} mm per arm x {} = {:g} mm = {:.3f} ft",
                     std::accumulate(lengths.begin(), lengths.end(), 0.0), b.batch_size, cable.millimetres, cable.feet);
  if (const auto* line = bom::find_line(b, "cable")) {
    const double listed = line->quantity.to_double();
    out += fmt::format("; the file budgets {:g} ft ({:+.3f} ft slack)\n", listed, listed - cable.feet);
  } else {
    out += "\n";
  }
  return {out, "txt"};
}

// -------------------------------------------------------------------- driver

int exit_code_for(ErrorCode code) { return static_cast<int>(code); }

json manifest_json(const std::string& subcommand, const std::vector<std::string>& argv, const Session& s,
                   const std::vector<fs::path>& outputs) {
  json m;
  m["tool"] = "forte";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["argv"] = argv;
  m["seed"] = s.common().seed;
  m["format"] = s.common().format;
  if (s.arm_loaded()) {
    m["arm"] = {{"path", s.arm_path().string()}, {"fnv1a64", hex64(fnv1a64(read_file(s.arm_path())))}};
  }
  json inputs = json::array();
  for (const auto& p : s.inputs) inputs.push_back({{"path", p.string()}, {"fnv1a64", hex64(fnv1a64(read_file(p)))}});
  m["inputs"] = inputs;
  json outs = json::array();
  for (const auto& p : outputs) {
    outs.push_back({{"file", p.filename().string()}, {"fnv1a64", hex64(fnv1a64(read_file(p)))}});
  }
  m["outputs"] = outs;
  return m;
}

// argv with --out and its value removed, so a manifest can be replayed anywhere.
std::vector<std::string> strip_out(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

int replay(const std::string& manifest_path, const std::string& out_override, std::ostream& out, std::ostream& err) {
  const json m = json::parse(read_file(manifest_path));
  const auto argv = m.at("argv").get<std::vector<std::string>>();
  const fs::path dir = out_override.empty() ? fs::path(manifest_path).parent_path() : fs::path(out_override);
  std::map<std::string, std::string> expected;
  for (const auto& o : m.at("outputs")) expected[o.at("file").get<std::string>()] = o.at("fnv1a64").get<std::string>();

  auto rerun = argv;
  rerun.push_back("--out");
  rerun.push_back(dir.empty() ? "." : dir.string());
  rerun.push_back("--quiet");
  std::ostringstream sink;
  const int status = run(rerun, sink, err);
  if (status != kExitOk) return status;

  int mismatches = 0;
  for (const auto& [file, hash] : expected) {
    const auto actual = hex64(fnv1a64(read_file(dir / file)));
    if (actual != hash) {
      ++mismatches;
      err << fmt::format("replay mismatch: {} expected {} got {}\n", file, hash, actual);
    }
  }
  if (mismatches > 0) return kExitReplayMismatch;
  out << fmt::format("replay ok: {} output(s) reproduced bit-exactly\n", expected.size());
  return kExitOk;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

fs::path resolve_arm_path(const std::string& spec) {
  auto shipped = [](const char* name) {
    return first_existing({fs::path(FORTE_SOURCE_DIR) / "configs" / name, fs::path(FORTE_DATA_INSTALL_DIR) / name});
  };
  if (spec == "default") return shipped("forte_default.json");
  if (spec == "literal") return shipped("forte_literal.json");
  return spec;
}

fs::path default_bom_path() {
  return first_existing(
      {fs::path(FORTE_SOURCE_DIR) / "tables" / "forte_bom.csv", fs::path(FORTE_DATA_INSTALL_DIR) / "forte_bom.csv"});
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Forte arm analysis toolkit. Angles on the command line are in degrees."};
  app.name("forte");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  if (const char* env = std::getenv("FORTE_ARM"); env && *env) common.arm = env;

  auto add_common = [&](CLI::App* sub, bool uses_arm) {
    if (uses_arm) {
      sub->add_option("--arm", common.arm,
                      "Arm description: a JSON path, 'default' or 'literal' (env FORTE_ARM)")
          ->capture_default_str();
    }
    sub->add_option("--seed", common.seed, "Random seed (u64)")->capture_default_str();
    sub->add_option("--out", common.out_dir, "Write the output and manifest.json into this directory");
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"text", "csv", "svg"}))
        ->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker threads; 0 = one per core")->capture_default_str();
    sub->add_flag("--quiet", common.quiet, "Suppress configuration notices on stderr");
  };

  std::function<Rendered(Session&)> handler;

  std::string q_text = "0,0,0,0,0,0";
  auto* fk = app.add_subcommand("fk", "Forward kinematics: end-effector pose [m] for joint angles");
  add_common(fk, true);
  fk->add_option("--q", q_text, "Six joint angles [deg], comma-separated")->capture_default_str();
  fk->callback([&] { handler = [&](Session& s) { return cmd_fk(s, q_text); }; });

  IkArgs ik_args;
  auto* ik = app.add_subcommand("ik", "Inverse kinematics by damped least squares");
  add_common(ik, true);
  ik->add_option("--xyz", ik_args.xyz, "Target position x,y,z [m]");
  ik->add_option("--rpy", ik_args.rpy, "Target roll,pitch,yaw [deg] (default: orientation at --seed-q)");
  ik->add_option("--target-q", ik_args.target_q, "Target given as the pose of these joint angles [deg]");
  ik->add_option("--seed-q", ik_args.seed_q, "Initial joint angles [deg]")->capture_default_str();
  ik->add_option("--max-iter", ik_args.options.max_iterations, "Iterations per start")->capture_default_str();
  ik->add_option("--restarts", ik_args.options.restarts, "Extra deterministic starts")->capture_default_str();
  ik->add_option("--tol-pos", ik_args.options.position_tolerance, "Position tolerance [m]")->capture_default_str();
  ik->add_option("--tol-rot", ik_args.options.orientation_tolerance, "Orientation tolerance [rad]")
      ->capture_default_str();
  ik->add_option("--damping", ik_args.options.damping, "Initial damping lambda [-]")->capture_default_str();
  ik->callback([&] { handler = [&](Session& s) { return cmd_ik(s, ik_args); }; });

  auto* jac = app.add_subcommand("jacobian", "Geometric Jacobian [m/rad; rad/rad] at joint angles");
  add_common(jac, true);
  jac->add_option("--q", q_text, "Six joint angles [deg], comma-separated")->capture_default_str();
  jac->callback([&] { handler = [&](Session& s) { return cmd_jacobian(s, q_text); }; });

  WorkspaceArgs ws_args;
  auto add_sampling = [&](CLI::App* sub, const char* default_steps) {
    sub->add_option("--steps", ws_args.steps, fmt::format("Grid points per joint [count] (default {})", default_steps));
    sub->add_option("--halton", ws_args.halton, "Use this many Halton samples instead of a grid [count]");
    sub->add_option("--max-samples", ws_args.max_samples, "Refuse sweeps larger than this [count]")
        ->capture_default_str();
  };
  auto* ws = app.add_subcommand("workspace", "Sample reachable end-effector positions [m]");
  add_common(ws, true);
  add_sampling(ws, "25,25,25,5,5,5");
  ws->add_option("--band", ws_args.band, "Outer radius fraction used for the azimuth span [-]")
      ->capture_default_str();
  ws->callback([&] { handler = [&](Session& s) { return cmd_workspace(s, ws_args); }; });

  auto* reach = app.add_subcommand("reach", "Dense workspace sweep reporting reach metrics [mm]");
  add_common(reach, true);
  add_sampling(reach, "11,41,41,5,5,5");
  reach->callback([&] { handler = [&](Session& s) { return cmd_reach(s, ws_args); }; });

  CapstanArgs cap_args;
  auto* cap = app.add_subcommand("capstan", "Capstan reduction, sheave height and winding count");
  add_common(cap, false);
  cap->add_option("--small", cap_args.small, "Small (sheave) diameter [mm]")->capture_default_str();
  cap->add_option("--large", cap_args.large, "Large (pulley) diameter [mm]")->capture_default_str();
  cap->add_option("--mode", cap_args.mode, "Which drum is fixed")
      ->check(CLI::IsMember({"rotating", "stationary"}))
      ->capture_default_str();
  cap->add_option("--cable", cap_args.cable, "Cable thickness t [mm]")->capture_default_str();
  cap->add_option("--tolerance", cap_args.tolerance, "Winding clearance delta [mm]")->capture_default_str();
  cap->add_option("--range", cap_args.range, "Output travel [deg]")->capture_default_str();
  cap->callback([&] { handler = [&](Session& s) { return cmd_capstan(s, cap_args); }; });

  auto* tt = app.add_subcommand("torque-table", "Per-joint holding torque, reduction and max torque [N*m]");
  add_common(tt, true);
  tt->callback([&] { handler = [&](Session& s) { return cmd_torque_table(s); }; });

  int res_joint = 0, res_microstep = 0;
  auto* res = app.add_subcommand("resolution", "Output angle per driver microstep [deg]");
  add_common(res, true);
  res->add_option("--joint", res_joint, "Only this joint (1-6)")->check(CLI::Range(1, 6));
  res->add_option("--microstep", res_microstep, "Override the microstep factor [count]")->check(CLI::PositiveNumber);
  res->callback([&] { handler = [&](Session& s) { return cmd_resolution(s, res_joint, res_microstep); }; });

  PayloadArgs pay_args;
  auto* pay = app.add_subcommand("payload", "Static gravity load report and max payload [kg]");
  add_common(pay, true);
  pay->add_option("--policy", pay_args.policy, "Worst-case sweep or a fixed pose")
      ->check(CLI::IsMember({"sweep", "fixed"}))
      ->capture_default_str();
  pay->add_option("--q", pay_args.q, "Report pose, and fixed joints of the sweep [deg]")->capture_default_str();
  pay->add_option("--step", pay_args.step, "Sweep grid step [deg]")->capture_default_str();
  pay->add_option("--payload", pay_args.payload, "Payload for the load report [kg]")->capture_default_str();
  pay->add_option("--tolerance", pay_args.tolerance, "Bisection tolerance [kg]")->capture_default_str();
  pay->callback([&] { handler = [&](Session& s) { return cmd_payload(s, pay_args); }; });

  RepeatArgs rep_args;
  auto* rep = app.add_subcommand("repeat-sim", "Monte-Carlo repeatability experiment [mm]");
  add_common(rep, true);
  rep->add_option("--speeds", rep_args.speeds, "Commanded step rates [steps/s]")->capture_default_str();
  rep->add_option("--cycles", rep_args.cycles, "Cycles per speed [count]")->capture_default_str();
  rep->add_option("--sigma0", rep_args.sigma0_mm, "Jitter std at rate 0 [mm] (default: fitted)");
  rep->add_option("--slope", rep_args.slope_mm, "Jitter growth [mm per step/s] (default: fitted)");
  rep->add_option("--payload", rep_args.payload, "Payload [kg]")->capture_default_str();
  rep->add_option("--probe", rep_args.probe, "Deviation along the dial axis or as a 3D norm")
      ->check(CLI::IsMember({"axis", "norm"}))
      ->capture_default_str();
  rep->add_flag("--no-missed-steps", rep_args.no_missed_steps, "Disable the torque-margin missed-step rule");
  rep->callback([&] { handler = [&](Session& s) { return cmd_repeat(s, rep_args); }; });

  BomArgs bom_args;
  auto* bm = app.add_subcommand("bom", "Bill of materials rollup [USD]");
  add_common(bm, false);
  bm->add_option("--file", bom_args.file, "BOM CSV (default: shipped table)");
  bm->add_option("--batch", bom_args.batch, "Override the batch size [arms]")->check(CLI::PositiveNumber);
  bm->add_option("--grams", bom_args.grams, "Filament per arm [g]")->capture_default_str();
  bm->add_option("--spool", bom_args.spool, "Filament per spool [g]")->capture_default_str();
  bm->add_option("--cables", bom_args.cables, "Cable lengths per arm [mm]")->capture_default_str();
  bm->callback([&] { handler = [&](Session& s) { return cmd_bom(s, bom_args); }; });

  std::string manifest_path, replay_out;
  bool replay_requested = false;
  auto* rp = app.add_subcommand("replay", "Re-run a manifest.json and verify its output hashes");
  rp->add_option("manifest", manifest_path, "Path to manifest.json")->required();
  rp->add_option("--out", replay_out, "Directory to regenerate into (default: the manifest's)");
  rp->callback([&] { replay_requested = true; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (replay_requested) return replay(manifest_path, replay_out, out, err);

    Session session(common, err);
    const Rendered r = handler(session);
    if (common.out_dir.empty()) {
      out << r.body;
      return kExitOk;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    const fs::path dir(common.out_dir);
    fs::create_directories(dir);
    const fs::path file = dir / fmt::format("{}.{}", name, r.extension);
    write_file(file, r.body);
    const json manifest = manifest_json(name, strip_out(args), session, {file});
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    out << fmt::format("wrote {} and {}\n", file.string(), (dir / "manifest.json").string());
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "invalid arm description:\n";
    for (const auto& v : e.violations()) err << fmt::format("  [{}] {} ({}): {}\n", v.code, v.path, v.type, v.message);
    return exit_code_for(e.code());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    err << "error: malformed manifest: " << e.what() << "\n";
    return exit_code_for(ErrorCode::kParse);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace forte::cli
