#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gradlens/analysis.hpp"

namespace {

using namespace gradlens;

// Synthetic store: n institutions, 12 years, a few CIP codes per cell.
Dataset synthetic(std::size_t institutions) {
  const auto scheme = CategoryScheme::ipeds_default();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> count(1, 200);
  const char* cips[] = {"11.0701", "11.0101", "52.0201", "26.0101", "14.0901"};
  std::vector<DegreeRecord> records;
  for (std::size_t i = 0; i < institutions; ++i)
    for (int year = 2010; year <= 2021; ++year)
      for (const char* cip : cips)
        for (std::size_t c = 0; c < scheme.cell_count(); ++c)
          records.push_back({"I" + std::to_string(i), year, cip, AwardLevel::Bachelors, scheme.cell_at(c),
                             count(rng)});
  return Dataset::from_records(scheme, std::move(records));
}

void BM_SelectTable(benchmark::State& state) {
  const auto dataset = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(select_table(dataset, {}, 2020, FieldScope::computing()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dataset.records().size()));
}
BENCHMARK(BM_SelectTable)->Arg(10)->Arg(100);

void BM_EvennessSeries(benchmark::State& state) {
  const auto dataset = synthetic(static_cast<std::size_t>(state.range(0)));
  EvennessRequest req;
  req.years = {2010, 2021};
  for (auto _ : state) benchmark::DoNotOptimize(evenness_series(dataset, req));
}
BENCHMARK(BM_EvennessSeries)->Arg(10)->Arg(100);

void BM_JsDistanceReport(benchmark::State& state) {
  const auto dataset = synthetic(static_cast<std::size_t>(state.range(0)));
  JsDistanceRequest req;
  req.year = 2020;
  for (auto _ : state) benchmark::DoNotOptimize(js_distance_report(dataset, req));
}
BENCHMARK(BM_JsDistanceReport)->Arg(10)->Arg(100);

}  // namespace
