#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "gradlens/metrics.hpp"

namespace {

using namespace gradlens;

Distribution random_distribution(std::mt19937_64& rng) {
  const auto scheme = CategoryScheme::ipeds_default();
  std::uniform_int_distribution<std::uint64_t> count(1, 5000);
  std::vector<std::uint64_t> counts(scheme.cell_count());
  for (auto& c : counts) c = count(rng);
  return normalize(CountTable(scheme, Axis::Intersectional, counts));
}

void BM_ShannonEntropy(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto p = random_distribution(rng);
  for (auto _ : state) benchmark::DoNotOptimize(shannon_entropy(p));
}
BENCHMARK(BM_ShannonEntropy);

void BM_Equitability(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto p = random_distribution(rng);
  for (auto _ : state) benchmark::DoNotOptimize(equitability(p, 14));
}
BENCHMARK(BM_Equitability);

void BM_JsDistance(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto p = random_distribution(rng);
  const auto q = random_distribution(rng);
  for (auto _ : state) benchmark::DoNotOptimize(js_distance(p, q));
}
BENCHMARK(BM_JsDistance);

}  // namespace
