#include <benchmark/benchmark.h>
#include <omp.h>

#include "crystal/observables.hpp"

using namespace crystal;

namespace {

struct Setup {
  HaldaneModel model{HaldaneParams{1.0, -1.0}};
  BZGrid grid = make_grid(model.lattice(), 24);
  std::vector<double> times = sample_times(20.0, 0.5);
  Vec2 ea = model.lattice().b2();
  Vec2 eb = model.lattice().b1();
};

void BM_sweep_parallel(benchmark::State& state) {
  Setup s;
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto tr = current_trace(s.model, s.grid, 1e-3, s.ea, s.eb, 0.0, s.times);
    benchmark::DoNotOptimize(tr.j_inst.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.grid.size()));
}

void BM_sweep_serial(benchmark::State& state) {
  Setup s;
  for (auto _ : state) {
    auto tr = current_trace_reference(s.model, s.grid, 1e-3, s.ea, s.eb, 0.0, s.times);
    benchmark::DoNotOptimize(tr.j_inst.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.grid.size()));
}

void BM_exp_midpoint_step(benchmark::State& state) {
  HaldaneModel model{HaldaneParams{1.0, -1.0}};
  CMatrix phi = CMatrix::Identity(2, 1);
  const CMatrix h = model.fiber(Vec2(0.3, 0.7));
  for (auto _ : state) {
    step_exp_midpoint(h, 0.01, phi);
    benchmark::DoNotOptimize(phi.data());
  }
}

}  // namespace

BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_exp_midpoint_step);

BENCHMARK_MAIN();
