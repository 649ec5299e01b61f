#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "forte/arm_model.hpp"
#include "forte/kinematics.hpp"

namespace forte {

struct MotionSegment {
  JointVector target = JointVector::Zero();  // rad
  double rate = 1000.0;                      // commanded microsteps/s
};

struct MotionCycle {
  JointVector reference = JointVector::Zero();
  std::vector<MotionSegment> segments;
  // Append a final move back to `reference` at the last segment's rate.
  bool return_to_reference = true;
};

// Away-and-back cycle through `excursion` (rad, added to the reference).
MotionCycle round_trip(const JointVector& reference, const JointVector& excursion, double rate);

enum class ProbeMode {
  kAxis,  // signed displacement along `probe_axis`, like a dial indicator
  kNorm,  // full 3D displacement magnitude
};

struct NoiseModel {
  double sigma0 = 0.0;  // m
  double slope = 0.0;   // m per (microstep/s)
  bool missed_steps = true;
  ProbeMode probe = ProbeMode::kAxis;
  Eigen::Vector3d probe_axis = Eigen::Vector3d::UnitZ();

  // Per-axis jitter std at a commanded rate.
  double sigma(double rate) const { return sigma0 + slope * rate; }
};

struct CycleResult {
  double deviation = 0.0;  // m, per the probe mode
  Eigen::Vector3d displacement = Eigen::Vector3d::Zero();  // final minus reference, m
  int missed_steps = 0;
  std::array<int, kJointCount> missed_per_joint{};
  JointVector final_q = JointVector::Zero();
};

// Runs one cycle: each move is rounded to whole microsteps, steps are lost
// where gravity load beats the torque available at the commanded rate, and
// seeded Gaussian jitter is added to the final end-effector position.
CycleResult simulate_cycle(const ArmDescription& arm, const MotionCycle& cycle, double payload,
                           const NoiseModel& noise, std::uint64_t seed);

// Microsteps lost on one move. required/available in N*m, steps signed.
int lost_microsteps(double required, double available, long long steps);

struct SpeedResult {
  double rate = 0.0;
  std::vector<double> deviations;  // m, one per cycle
  double mean = 0.0;               // m
  double stddev = 0.0;             // m, sample (n - 1)
  int missed_steps = 0;
};

struct RepeatabilityResult {
  std::vector<SpeedResult> speeds;
  double grand_mean = 0.0;   // m, mean |deviation| over every cycle
  double mean_stddev = 0.0;  // m, mean of the per-speed stds
  std::uint64_t seed = 0;
};

struct ExperimentOptions {
  JointVector reference = JointVector::Zero();
  JointVector excursion = JointVector::Zero();  // rad; each cycle visits reference + excursion
  double payload = 0.0;
  unsigned threads = 0;
};

// Default away-and-back move used by the repeatability experiment.
ExperimentOptions default_experiment();

// Seed of cycle `cycle` at speed index `speed`: independent of run order.
std::uint64_t cycle_seed(std::uint64_t seed, std::size_t speed, std::size_t cycle);

RepeatabilityResult repeatability_experiment(const ArmDescription& arm, const std::vector<double>& speeds,
                                             int cycles_per_speed, const NoiseModel& noise,
                                             std::uint64_t seed, const ExperimentOptions& options = default_experiment());

// Least-squares affine fit of std against rate. Throws Error(kDegenerateFit)
// with fewer than two distinct rates.
NoiseModel calibrate_noise(const std::vector<std::pair<double, double>>& rate_std);

double sample_stddev(const std::vector<double>& values);

}  // namespace forte
