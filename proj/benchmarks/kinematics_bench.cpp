#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bench_arm.hpp"
#include "forte/kinematics.hpp"

namespace {

using namespace forte;

std::vector<JointVector> random_poses(std::size_t n) {
  const auto& arm = bench::default_arm();
  std::mt19937_64 rng(42);
  std::vector<JointVector> out(n);
  for (auto& q : out) {
    for (int i = 0; i < kJointCount; ++i) {
      q[i] = std::uniform_real_distribution<double>(arm.limits[i].min, arm.limits[i].max)(rng);
    }
  }
  return out;
}

void BM_ForwardKinematics(benchmark::State& state) {
  const auto& arm = bench::default_arm();
  const auto poses = random_poses(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_kinematics(arm, poses[i++ & 1023]));
  }
}
BENCHMARK(BM_ForwardKinematics);

void BM_Jacobian(benchmark::State& state) {
  const auto& arm = bench::default_arm();
  const auto poses = random_poses(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(jacobian(arm, poses[i++ & 1023]));
  }
}
BENCHMARK(BM_Jacobian);

// Range 0: restarts. Failures are counted, not skipped, so the timing
// includes the cost of exhausting every start.
void BM_InverseKinematicsFromHome(benchmark::State& state) {
  const auto& arm = bench::default_arm();
  const auto poses = random_poses(256);
  std::vector<Pose> targets;
  for (const auto& q : poses) targets.push_back(forward_kinematics(arm, q));
  IkOptions options;
  options.restarts = static_cast<int>(state.range(0));
  std::size_t i = 0;
  long failures = 0;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(inverse_kinematics(arm, targets[i++ & 255], JointVector::Zero(), options));
    } catch (const IkFailure&) {
      ++failures;
    }
  }
  state.counters["failure_rate"] =
      benchmark::Counter(static_cast<double>(failures) / static_cast<double>(state.iterations()));
}
BENCHMARK(BM_InverseKinematicsFromHome)->Arg(0)->Arg(8)->Arg(32);

}  // namespace
