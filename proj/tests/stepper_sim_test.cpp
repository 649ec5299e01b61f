#include <gtest/gtest.h>

#include <random>

#include <boost/math/distributions/fisher_f.hpp>

#include "forte/drivetrain.hpp"
#include "forte/kinematics.hpp"
#include "forte/prototype.hpp"
#include "forte/statics.hpp"
#include "forte/stepper_sim.hpp"
#include "forte/units.hpp"
#include "test_support.hpp"

namespace forte {
namespace {

using test::default_arm;
using test::deg;

NoiseModel quiet() {
  NoiseModel n;
  n.sigma0 = 0.0;
  n.slope = 0.0;
  return n;
}

NoiseModel calibrated() {
  return calibrate_noise({prototype::kRepeatabilityAnchors.begin(), prototype::kRepeatabilityAnchors.end()});
}

// Joint vector that lands exactly on each joint's microstep grid.
JointVector on_grid(const std::array<long long, kJointCount>& counts) {
  JointVector q;
  for (int j = 0; j < kJointCount; ++j) {
    q[j] = static_cast<double>(counts[j]) * drivetrain::joint_resolution_rad(default_arm().drives[j]);
  }
  return q;
}

TEST(StepperSim, OnGridNoiselessCycleReturnsExactly) {
  const auto cycle = round_trip(on_grid({0, 2500, -300, 0, -400, 0}), on_grid({1600, 1000, 300, 800, 400, 1200}), 1000);
  const auto r = simulate_cycle(default_arm(), cycle, 0.0, quiet(), 1);
  EXPECT_EQ(r.deviation, 0.0);
  EXPECT_EQ(r.missed_steps, 0);
  EXPECT_EQ(r.displacement, Eigen::Vector3d::Zero());
}

TEST(StepperSim, OverloadMissesSteps) {
  const JointVector ref = deg(0, 30, -30, 0, -30, 0);
  PosePolicy p;
  p.kind = PosePolicy::Kind::kFixed;
  p.q = ref;
  const double limit = max_payload(default_arm(), p).payload;
  const auto cycle = round_trip(ref, deg(20, 10, 10, 0, 10, 0), 1500);
  const auto ok = simulate_cycle(default_arm(), cycle, 0.0, quiet(), 1);
  EXPECT_EQ(ok.missed_steps, 0);
  const auto bad = simulate_cycle(default_arm(), cycle, limit * 1.5, quiet(), 1);
  EXPECT_GT(bad.missed_steps, 0);
  EXPECT_GT(bad.displacement.norm(), 0.0);
}

TEST(StepperSim, LostMicrostepRule) {
  EXPECT_EQ(lost_microsteps(1.0, 2.0, 100), 0);
  EXPECT_EQ(lost_microsteps(2.0, 1.0, 100), 50);
  EXPECT_EQ(lost_microsteps(-2.0, 1.0, -100), 50);
  EXPECT_EQ(lost_microsteps(3.0, 2.0, 10), 4);
  EXPECT_EQ(lost_microsteps(2.0, 1.0, 0), 1);
  EXPECT_EQ(lost_microsteps(2.0, 0.0, 7), 7);
}

TEST(StepperSim, FixedSeedIsReproducible) {
  const auto cycle = round_trip(deg(0, 30, -30, 0, -30, 0), deg(45, 20, 30, 60, 30, 90), 2000);
  const auto a = simulate_cycle(default_arm(), cycle, 0.2, calibrated(), 42);
  const auto b = simulate_cycle(default_arm(), cycle, 0.2, calibrated(), 42);
  EXPECT_EQ(a.deviation, b.deviation);
  EXPECT_EQ(a.displacement, b.displacement);
  const auto c = simulate_cycle(default_arm(), cycle, 0.2, calibrated(), 43);
  EXPECT_NE(a.deviation, c.deviation);
}

TEST(StepperSim, ExperimentIsThreadInvariant) {
  const std::vector<double> speeds(prototype::kTestedRates.begin(), prototype::kTestedRates.end());
  auto o = default_experiment();
  o.threads = 1;
  const auto a = repeatability_experiment(default_arm(), speeds, 12, calibrated(), 7, o);
  o.threads = 4;
  const auto b = repeatability_experiment(default_arm(), speeds, 12, calibrated(), 7, o);
  o.threads = 7;
  const auto c = repeatability_experiment(default_arm(), speeds, 12, calibrated(), 7, o);
  for (std::size_t s = 0; s < speeds.size(); ++s) {
    EXPECT_EQ(a.speeds[s].deviations, b.speeds[s].deviations);
    EXPECT_EQ(a.speeds[s].deviations, c.speeds[s].deviations);
  }
  EXPECT_EQ(a.grand_mean, c.grand_mean);
}

TEST(StepperSim, DefaultCalibrationStdsInBand) {
  const std::vector<double> speeds(prototype::kTestedRates.begin(), prototype::kTestedRates.end());
  const auto r = repeatability_experiment(default_arm(), speeds, prototype::kCyclesPerSpeed, calibrated(), 0);
  ASSERT_EQ(r.speeds.size(), 5u);
  for (const auto& s : r.speeds) {
    EXPECT_EQ(s.deviations.size(), 10u);
    EXPECT_GE(s.stddev, 0.0);
    EXPECT_EQ(s.missed_steps, 0);
  }
  // Ten cycles leave wide sampling error; the band check runs on 100 cycles below.
  const auto big = repeatability_experiment(default_arm(), speeds, 100, calibrated(), 0);
  for (const auto& s : big.speeds) {
    EXPECT_GE(s.stddev, 0.2e-3) << s.rate;
    EXPECT_LE(s.stddev, 0.7e-3) << s.rate;
  }
}

TEST(StepperSim, ZeroNoiseGivesZeroStd) {
  const auto r = repeatability_experiment(default_arm(), {500, 2500}, 5, quiet(), 3);
  for (const auto& s : r.speeds) EXPECT_EQ(s.stddev, 0.0);
}

TEST(StepperSim, FasterIsNoisierWithSignificance) {
  NoiseModel n;
  n.sigma0 = 0.2e-3;
  n.slope = 1.5e-7;
  const auto r = repeatability_experiment(default_arm(), {500, 2500}, 200, n, 11);
  const double s1 = r.speeds[0].stddev, s2 = r.speeds[1].stddev;
  EXPECT_GT(s2, s1);
  const double f = (s2 * s2) / (s1 * s1);
  const boost::math::fisher_f dist(199, 199);
  EXPECT_LT(boost::math::cdf(boost::math::complement(dist, f)), 1e-3);
}

TEST(StepperSim, CalibrationHandOracle) {
  // Two equations: 0.286 = s0 + 500 k, 0.587 = s0 + 2500 k (mm).
  const double k = (0.587 - 0.286) / 2000.0;
  const double s0 = 0.286 - 500.0 * k;
  const auto n = calibrated();
  EXPECT_NEAR(n.slope * 1e3, k, 1e-12);
  EXPECT_NEAR(n.sigma0 * 1e3, s0, 1e-12);
  EXPECT_NEAR(n.slope * 1e3, 1.505e-4, 1e-12);
  EXPECT_NEAR(n.sigma0 * 1e3, 0.21075, 1e-12);
}

TEST(StepperSim, CalibrationDegenerate) {
  try {
    calibrate_noise({{1000, 0.3e-3}, {1000, 0.4e-3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateFit);
  }
}

TEST(StepperSim, CalibrationRecoversKnownModel) {
  NoiseModel truth;
  truth.sigma0 = 0.25e-3;
  truth.slope = 1.2e-7;
  const std::vector<double> speeds{500, 1000, 1500, 2000, 2500};
  const auto r = repeatability_experiment(default_arm(), speeds, 4000, truth, 5);
  std::vector<std::pair<double, double>> pairs;
  for (const auto& s : r.speeds) pairs.emplace_back(s.rate, s.stddev);
  const auto fit = calibrate_noise(pairs);
  EXPECT_NEAR(fit.sigma0, truth.sigma0, 0.05 * truth.sigma0);
  EXPECT_NEAR(fit.slope, truth.slope, 0.05 * truth.slope);
}

TEST(StepperSim, StdOfStdHalvesWhenCyclesQuadruple) {
  NoiseModel n;
  n.sigma0 = 0.3e-3;
  constexpr int kReplicates = 400;
  auto spread = [&](int cycles) {
    std::vector<double> stds;
    for (int rep = 0; rep < kReplicates; ++rep) {
      stds.push_back(repeatability_experiment(default_arm(), {1000}, cycles, n, 1000 + rep).speeds[0].stddev);
    }
    return sample_stddev(stds);
  };
  const double ratio = spread(40) / spread(10);
  EXPECT_NEAR(ratio, 0.5, 0.1);
}

TEST(StepperSim, QuantizationErrorBoundedByHalfMicrostep) {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 50; ++n) {
    const JointVector ref = test::random_q(default_arm(), rng, 0.3);
    const auto cycle = round_trip(ref, JointVector::Constant(0.1), 1000);
    NoiseModel m = quiet();
    m.missed_steps = false;
    const auto r = simulate_cycle(default_arm(), cycle, 0.0, m, 0);
    const Jacobian j = jacobian(default_arm(), ref);
    double bound = 0.0;
    for (int k = 0; k < kJointCount; ++k) {
      bound += j.block<3, 1>(0, k).norm() * 0.5 * drivetrain::joint_resolution_rad(default_arm().drives[k]);
    }
    EXPECT_LE(r.displacement.norm(), bound * 1.01 + 1e-12);
  }
}

TEST(StepperSim, ProbeModes) {
  NoiseModel n;
  n.sigma0 = 1e-3;
  const auto cycle = round_trip(deg(0, 30, -30, 0, -30, 0), deg(10, 0, 0, 0, 0, 0), 500);
  n.probe = ProbeMode::kAxis;
  const auto a = simulate_cycle(default_arm(), cycle, 0.0, n, 9);
  n.probe = ProbeMode::kNorm;
  const auto b = simulate_cycle(default_arm(), cycle, 0.0, n, 9);
  EXPECT_EQ(a.displacement, b.displacement);
  EXPECT_DOUBLE_EQ(a.deviation, a.displacement.z());
  EXPECT_DOUBLE_EQ(b.deviation, b.displacement.norm());
}

TEST(StepperSim, ExperimentPreconditions) {
  EXPECT_THROW(repeatability_experiment(default_arm(), {}, 10, quiet(), 0), Error);
  EXPECT_THROW(repeatability_experiment(default_arm(), {500}, 1, quiet(), 0), Error);
  EXPECT_THROW(repeatability_experiment(default_arm(), {-500}, 5, quiet(), 0), Error);
}

TEST(StepperSim, CycleSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::size_t s = 0; s < 5; ++s)
    for (std::size_t c = 0; c < 100; ++c) seen.insert(cycle_seed(0, s, c));
  EXPECT_EQ(seen.size(), 500u);
}

}  // namespace
}  // namespace forte
