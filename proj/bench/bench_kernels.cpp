#include <benchmark/benchmark.h>

#include "trajsmooth/simulator.hpp"
#include "trajsmooth/smc.hpp"

using namespace trajsmooth;

namespace {

const SimulatedDataset& dataset() {
  static const SimulatedDataset ds = simulate_dataset(simulation_true_params(), MissingnessParams{}, 1440, 7);
  return ds;
}

void run(benchmark::State& state, Execution exec) {
  const auto& ds = dataset();
  const auto n = static_cast<std::size_t>(state.range(0));
  PgasSampler sampler(n, 11, exec);
  auto rng = make_rng(3, {});
  for (auto _ : state) {
    auto res = sampler.sample(ds.obs, ds.params_used, rng);
    benchmark::DoNotOptimize(res.path.X.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * ds.obs.size()));
}

void BM_PgasSerial(benchmark::State& state) { run(state, Execution::serial); }
void BM_PgasParallel(benchmark::State& state) { run(state, Execution::parallel); }

}  // namespace

BENCHMARK(BM_PgasSerial)->Arg(200)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PgasParallel)->Arg(200)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
