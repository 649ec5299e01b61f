#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "bench_arm.hpp"
#include "forte/bom.hpp"

namespace {

using namespace forte;

std::string read_table() {
  std::ifstream in(bench::data_path("tables/forte_bom.csv"));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void BM_ParseBom(benchmark::State& state) {
  const std::string csv = read_table();
  for (auto _ : state) {
    const auto bom = bom::parse_bom(csv);
    benchmark::DoNotOptimize(bom::batch_total(bom));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<long>(csv.size()));
}
BENCHMARK(BM_ParseBom);

void BM_ParseDecimal(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(bom::parse_decimal("1234.56789"));
  }
}
BENCHMARK(BM_ParseDecimal);

}  // namespace
