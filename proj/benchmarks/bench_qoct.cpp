// Microbenchmarks for the hot paths: superoperator assembly, the per-interval
// matrix exponential, one Krotov sweep, and the Monte-Carlo fidelity loop.
#include <benchmark/benchmark.h>

#include "qoct/experiments.hpp"

namespace {

using namespace qoct;

SystemSpec system_for(int d) {
  switch (d) {
    case 2: return build_qubit();
    case 3: return build_qutrit();
    default: return build_four_level();
  }
}

NoiseChannel channel_for(const SystemSpec& sys, double gamma) {
  return channel_catalog(sys.dim == 4 ? "leak_iv" : "amp_damping", gamma, sys);
}

ExperimentConfig gate_config(int d, int N) {
  ExperimentConfig c;
  c.system = d == 2 ? "qubit" : d == 3 ? "qutrit" : "four_level";
  c.gate = d == 4 ? "x_subspace" : "qft";
  c.task = "gate";
  c.state_set = d == 4 ? "leakage_set" : "basis_plus_superposition";
  c.channel = d == 4 ? "leak_iv" : "amp_damping";
  c.grid = TimeGrid(10.0, N);
  c.optimizer.lambda = 0.1;
  return c;
}

void BM_liouvillian(benchmark::State& state) {
  SystemSpec sys = system_for(static_cast<int>(state.range(0)));
  NoiseChannel chan = channel_for(sys, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(liouvillian(sys.H0, chan));
}
BENCHMARK(BM_liouvillian)->Arg(2)->Arg(3)->Arg(4);

void BM_step_exponential(benchmark::State& state) {
  SystemSpec sys = system_for(static_cast<int>(state.range(0)));
  StepGenerator gen(sys.H0, sys.H1, channel_for(sys, 0.05));
  for (auto _ : state) benchmark::DoNotOptimize(gen.step(1e-2, 5e-3));
}
BENCHMARK(BM_step_exponential)->Arg(2)->Arg(3)->Arg(4);

void BM_forward_pass(benchmark::State& state) {
  ExperimentConfig c = gate_config(static_cast<int>(state.range(0)), 500);
  ResolvedExperiment res = resolve(c, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(forward_all(res.problem, res.problem.trial));
}
BENCHMARK(BM_forward_pass)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_krotov_sweep(benchmark::State& state) {
  ExperimentConfig c = gate_config(static_cast<int>(state.range(0)), 500);
  ResolvedExperiment res = resolve(c, 0.05);
  ForwardData fwd = forward_all(res.problem, res.problem.trial);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        krotov_step_cached(res.problem, res.problem.trial, fwd, res.problem.lambda));
}
BENCHMARK(BM_krotov_sweep)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_mc_fidelity(benchmark::State& state) {
  SystemSpec sys = build_qutrit();
  GateSpec gate = gate_catalog("qft", sys);
  Matrix C = Matrix::Identity(9, 9);
  for (auto _ : state)
    benchmark::DoNotOptimize(mean_gate_fidelity_of_channel(
        C, gate.O, sys.computational_levels, static_cast<int>(state.range(0)), 7, 1));
}
BENCHMARK(BM_mc_fidelity)->Arg(4096)->Arg(20736)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
