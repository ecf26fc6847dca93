#include <benchmark/benchmark.h>

#include "oqsim/cascade.hpp"
#include "oqsim/models.hpp"
#include "oqsim/propagate.hpp"
#include "oqsim/trajectories.hpp"

namespace {

using namespace oqsim;

std::vector<double> grid(double t_max, int points) {
  std::vector<double> t(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) t[size_t(i)] = t_max * double(i) / double(points - 1);
  return t;
}

ModelSpec cavity(int n_max) { return model_damped_cavity(n_max, 1.0, 0.25, n_max); }

void BM_CompileModel(benchmark::State& state) {
  const ModelSpec spec = cavity(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compile_model(spec));
}
BENCHMARK(BM_CompileModel)->Arg(3)->Arg(7)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_OracleExpm(benchmark::State& state) {
  const CompiledModel m = compile_model(cavity(int(state.range(0))));
  const auto times = grid(8.0, 20);
  for (auto _ : state)
    benchmark::DoNotOptimize(propagate_expm(m.liouvillian, m.spec.initial_state, times));
}
BENCHMARK(BM_OracleExpm)->Arg(3)->Arg(7)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_OracleAdaptive(benchmark::State& state) {
  const CompiledModel m = compile_model(cavity(int(state.range(0))));
  const auto times = grid(8.0, 20);
  for (auto _ : state)
    benchmark::DoNotOptimize(propagate_adaptive(m.liouvillian, m.spec.initial_state, times));
}
BENCHMARK(BM_OracleAdaptive)->Arg(3)->Arg(7)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_SectorCascade(benchmark::State& state) {
  const CompiledModel m = compile_model(cavity(int(state.range(0))));
  const SectorBlocks split = sector_split(m.spec.initial_state, m.spectrum);
  const EffectiveGenerator gen = effective_generator(m.h_eff, m.spec.tensor, m.decomp);
  const auto times = grid(8.0, 20);
  for (auto _ : state)
    benchmark::DoNotOptimize(cascade_solve(split, gen, m.spec.tensor, m.decomp, times));
}
BENCHMARK(BM_SectorCascade)->Arg(3)->Arg(7)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_Trajectories(benchmark::State& state) {
  const CompiledModel m = compile_model(model_two_atoms(1.0, 1.0, 0.6, 0.2));
  const EffectiveGenerator gen = effective_generator(m.h_eff, m.spec.tensor, m.decomp);
  const JumpChannelSet ch = diagonalize_channels(m.spec.tensor, m.decomp);
  Vector psi0 = Vector::Zero(4);
  psi0(3) = 1.0;
  const auto times = grid(6.0, 30);
  const auto count = std::uint64_t(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(run_ensemble(psi0, gen, ch, times, 42, count));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(count));
}
BENCHMARK(BM_Trajectories)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const ModelSpec spec =
      model_n_atoms_cavity(int(state.range(0)), std::vector<double>(size_t(state.range(0)), 1.0),
                           1.0, 0.5, 0.1, 2);
  const auto ops = spec.coupling_ops();
  for (auto _ : state) benchmark::DoNotOptimize(decompose(spec.h_sys, ops));
}
BENCHMARK(BM_Decompose)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
