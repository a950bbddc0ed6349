// Serial references vs OpenMP drivers for the four parallel kernels.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "kgcoh/oracle.hpp"
#include "kgcoh/serial.hpp"

namespace {

using namespace kgcoh;

const auto kLinear = linear::LinearModel::make(1.0, 1.0);
const auto kPT = pt::PTModel::make(1.0, 1.0);

void BM_TimeSeries(benchmark::State& st, bool parallel) {
  const linear::CoherentSpec spec{{1.0, 2.0}, 50};
  const auto times = linear::uniform_times(0.0, 100.0, 0.05);
  for (auto _ : st) {
    auto r = parallel ? linear::time_series(kLinear, spec, times)
                      : serial::time_series(kLinear, spec, times);
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(times.size()));
}

void BM_Synthesize(benchmark::State& st, bool parallel) {
  const auto state =
      evolution::make_state(kPT, pt::coherent_coefficients(kPT, {1.0, 0.5}, 60));
  const Grid grid = evolution::default_grid(state.model);
  for (auto _ : st) {
    auto f = parallel ? evolution::synthesize(state, grid, 1.3)
                      : serial::synthesize(state, grid, 1.3);
    benchmark::DoNotOptimize(f);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(grid.count()));
}

void BM_Eigenvalues(benchmark::State& st, bool parallel) {
  const auto h = oracle::build_hamiltonian(oracle::poschl_teller_spec(1.0, 1.0, 8001));
  for (auto _ : st) {
    auto e = parallel ? tridiag_smallest_eigenvalues(h, 9)
                      : serial::tridiag_smallest_eigenvalues(h, 9);
    benchmark::DoNotOptimize(e);
  }
}

void BM_MeasureMoments(benchmark::State& st, bool parallel) {
  for (auto _ : st) {
    auto r = parallel ? pt::verify_measure_moments(kPT, 10, 1e-6)
                      : serial::verify_measure_moments(kPT, 10, 1e-6);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_TimeSeries, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TimeSeries, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Synthesize, serial, false)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Synthesize, openmp, true)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Eigenvalues, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Eigenvalues, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MeasureMoments, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MeasureMoments, openmp, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
