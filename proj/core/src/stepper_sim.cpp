#include "forte/stepper_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "forte/drivetrain.hpp"
#include "forte/parallel.hpp"
#include "forte/statics.hpp"
#include "forte/units.hpp"

namespace forte {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

MotionCycle round_trip(const JointVector& reference, const JointVector& excursion, double rate) {
  MotionCycle c;
  c.reference = reference;
  c.segments.push_back({reference + excursion, rate});
  c.return_to_reference = true;
  return c;
}

int lost_microsteps(double required, double available, long long steps) {
  required = std::abs(required);
  if (required <= available) return 0;
  const long long quanta = std::max<long long>(std::llabs(steps), 1);
  if (available <= 0.0) return static_cast<int>(quanta);
  return static_cast<int>(std::ceil((1.0 - available / required) * static_cast<double>(quanta)));
}

CycleResult simulate_cycle(const ArmDescription& arm, const MotionCycle& cycle, double payload,
                           const NoiseModel& noise, std::uint64_t seed) {
  std::array<double, kJointCount> resolution{};
  std::array<long long, kJointCount> position{};  // actual microstep counts from zero
  for (int j = 0; j < kJointCount; ++j) {
    resolution[j] = drivetrain::joint_resolution_rad(arm.drives[j]);
    position[j] = std::llround(cycle.reference[j] / resolution[j]);
  }
  auto angles = [&](const std::array<long long, kJointCount>& counts) {
    JointVector q;
    for (int j = 0; j < kJointCount; ++j) q[j] = static_cast<double>(counts[j]) * resolution[j];
    return q;
  };

  std::vector<MotionSegment> moves = cycle.segments;
  if (cycle.return_to_reference) {
    moves.push_back({cycle.reference, moves.empty() ? 0.0 : moves.back().rate});
  }

  CycleResult result;
  for (const auto& move : moves) {
    std::array<long long, kJointCount> commanded{};
    for (int j = 0; j < kJointCount; ++j) commanded[j] = std::llround(move.target[j] / resolution[j]);
    if (!noise.missed_steps) {
      position = commanded;
      continue;
    }
    const JointVector tau_start = gravity_torques(arm, angles(position), payload);
    const JointVector tau_end = gravity_torques(arm, angles(commanded), payload);
    for (int j = 0; j < kJointCount; ++j) {
      const auto& drive = arm.drives[j];
      const long long steps = commanded[j] - position[j];
      const double hold = std::abs(tau_end[j]) >= std::abs(tau_start[j]) ? tau_end[j] : tau_start[j];
      const double reduction = drivetrain::total_reduction(drive);
      const double available =
          (steps != 0 ? drive.motor.torque_at(move.rate) : drive.motor.holding_torque) * reduction;
      const int lost = lost_microsteps(hold, available, steps);
      if (steps != 0) {
        const long long kept = std::llabs(steps) - std::min<long long>(lost, std::llabs(steps));
        position[j] += (steps > 0 ? kept : -kept);
      } else {
        // Gravity drags an overloaded idle joint against its holding torque.
        position[j] -= sign_of(hold) * lost;
      }
      result.missed_per_joint[j] += lost;
      result.missed_steps += lost;
    }
  }

  result.final_q = angles(position);
  result.displacement =
      forward_kinematics(arm, result.final_q).position - forward_kinematics(arm, cycle.reference).position;

  const double rate = moves.empty() ? 0.0 : moves.back().rate;
  const double sigma = noise.sigma(rate);
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (int i = 0; i < 3; ++i) result.displacement[i] += normal(rng);
  }
  result.deviation = noise.probe == ProbeMode::kAxis
                         ? result.displacement.dot(noise.probe_axis.normalized())
                         : result.displacement.norm();
  return result;
}

ExperimentOptions default_experiment() {
  ExperimentOptions o;
  o.reference << 0.0, deg_to_rad(30.0), deg_to_rad(-30.0), 0.0, deg_to_rad(-30.0), 0.0;
  o.excursion << deg_to_rad(45.0), deg_to_rad(20.0), deg_to_rad(30.0), deg_to_rad(60.0), deg_to_rad(30.0),
      deg_to_rad(90.0);
  return o;
}

std::uint64_t cycle_seed(std::uint64_t seed, std::size_t speed, std::size_t cycle) {
  return splitmix64(splitmix64(seed ^ splitmix64(speed)) + cycle);
}

double sample_stddev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

RepeatabilityResult repeatability_experiment(const ArmDescription& arm, const std::vector<double>& speeds,
                                             int cycles_per_speed, const NoiseModel& noise,
                                             std::uint64_t seed, const ExperimentOptions& options) {
  if (speeds.empty()) throw Error(ErrorCode::kEmptyInput, "no speeds given");
  if (cycles_per_speed < 2) {
    throw Error(ErrorCode::kValidation, fmt::format("need at least 2 cycles per speed, got {}", cycles_per_speed));
  }
  for (double s : speeds) {
    if (!(s > 0.0)) throw Error(ErrorCode::kValidation, fmt::format("step rate must be positive, got {}", s));
  }

  const auto cycles = static_cast<std::size_t>(cycles_per_speed);
  std::vector<CycleResult> runs(speeds.size() * cycles);
  parallel_for(runs.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t s = i / cycles;
      const auto cycle = round_trip(options.reference, options.excursion, speeds[s]);
      runs[i] = simulate_cycle(arm, cycle, options.payload, noise, cycle_seed(seed, s, i % cycles));
    }
  });

  RepeatabilityResult r;
  r.seed = seed;
  double abs_sum = 0.0;
  for (std::size_t s = 0; s < speeds.size(); ++s) {
    SpeedResult sr;
    sr.rate = speeds[s];
    for (std::size_t c = 0; c < cycles; ++c) {
      const auto& run = runs[s * cycles + c];
      sr.deviations.push_back(run.deviation);
      sr.missed_steps += run.missed_steps;
      abs_sum += std::abs(run.deviation);
    }
    sr.mean = std::accumulate(sr.deviations.begin(), sr.deviations.end(), 0.0) / static_cast<double>(cycles);
    sr.stddev = sample_stddev(sr.deviations);
    r.mean_stddev += sr.stddev;
    r.speeds.push_back(std::move(sr));
  }
  r.grand_mean = abs_sum / static_cast<double>(runs.size());
  r.mean_stddev /= static_cast<double>(speeds.size());
  return r;
}

NoiseModel calibrate_noise(const std::vector<std::pair<double, double>>& rate_std) {
  std::set<double> distinct;
  for (const auto& [rate, std] : rate_std) distinct.insert(rate);
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kDegenerateFit,
                fmt::format("noise fit needs at least two distinct step rates, got {}", distinct.size()));
  }
  const double n = static_cast<double>(rate_std.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : rate_std) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : rate_std) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  NoiseModel m;
  m.slope = sxy / sxx;
  m.sigma0 = my - m.slope * mx;
  if (m.slope < 0.0 || m.sigma0 < 0.0) {
    throw Error(ErrorCode::kDegenerateFit,
                fmt::format("fit gives negative noise terms (sigma0 = {:.4g} m, slope = {:.4g} m*s)", m.sigma0,
                            m.slope));
  }
  return m;
}

}  // namespace forte
