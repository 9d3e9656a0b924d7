// Serial reference against the OpenMP kernels for the two per-iteration
// sweeps over all control intervals.

#include <benchmark/benchmark.h>

#include <random>

#include "scvx/mission.hpp"

namespace {

using namespace scvx;

struct Fixture {
  VehicleModel vehicle = build_apollo_csm();
  std::vector<ChaserState> states;
  ImpulseSchedule schedule;

  Fixture() {
    MissionSpec spec;
    const RendezvousProblem p = make_problem(spec, vehicle);
    InitialGuess g = initial_guess(p);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < g.schedule.N(); ++k) {
      for (int i = 0; i < g.schedule.M(); ++i) g.schedule.widths(k, i) = u(rng) < 0.7 ? 0.0 : 0.5 * u(rng);
    }
    states = g.states;
    schedule = g.schedule;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Discretize(benchmark::State& st) {
  const Fixture& f = fixture();
  const Execution exec = st.range(0) == 0 ? Execution::serial : Execution::parallel;
  for (auto _ : st) {
    benchmark::DoNotOptimize(discretize_trajectory(f.states, f.schedule, f.vehicle, {}, exec));
  }
  st.SetLabel(st.range(0) == 0 ? "serial" : "openmp");
}

void BM_PropagateWithReset(benchmark::State& st) {
  const Fixture& f = fixture();
  const Execution exec = st.range(0) == 0 ? Execution::serial : Execution::parallel;
  for (auto _ : st) {
    benchmark::DoNotOptimize(propagate_with_reset(f.states, f.schedule, f.vehicle, {}, 0, exec));
  }
  st.SetLabel(st.range(0) == 0 ? "serial" : "openmp");
}

}  // namespace

BENCHMARK(BM_Discretize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PropagateWithReset)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
