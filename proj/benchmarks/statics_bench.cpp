#include <benchmark/benchmark.h>

#include "bench_arm.hpp"
#include "forte/statics.hpp"

namespace {

using namespace forte;

void BM_GravityTorques(benchmark::State& state) {
  JointVector q;
  q << 0.1, -0.4, 0.7, 0.2, 0.3, -0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gravity_torques(bench::default_arm(), q, 0.5));
  }
}
BENCHMARK(BM_GravityTorques);

void BM_MaxPayloadSweep(benchmark::State& state) {
  PosePolicy policy;
  policy.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_payload(bench::default_arm(), policy).payload);
  }
}
BENCHMARK(BM_MaxPayloadSweep)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
