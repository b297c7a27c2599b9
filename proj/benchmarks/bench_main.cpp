#include <benchmark/benchmark.h>

#include "rotbec/energy.hpp"
#include "rotbec/minimizer.hpp"
#include "rotbec/spectrum.hpp"

using namespace rotbec;

namespace {

GpProblem harmonic_problem(double frac) {
  return make_problem(frac * default_townes().constants.a_star, {PotentialSpec::harmonic(), 1.0});
}

void BM_Fft2DForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Fft2D fft(n);
  const Field2D u = random_init(Grid2D(n, 12.0), 1);
  CVector out;
  for (auto _ : state) {
    fft.forward(u.data(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Fft2DForward)->Arg(128)->Arg(256)->Arg(512);

// One energy evaluation with H u: the per-step cost of the flow.
void BM_EnergyAndHamiltonian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GpProblem p = harmonic_problem(0.9);
  const Grid2D g(n, 8.0);
  const GpOperator op(g, p);
  const Field2D u = gaussian_init(g, 1.0);
  CVector hu;
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.evaluate(u, &hu));
  }
}
BENCHMARK(BM_EnergyAndHamiltonian)->Arg(128)->Arg(256);

// A fixed number of flow steps from a Gaussian start.
void BM_FlowSteps(benchmark::State& state) {
  const GpProblem p = harmonic_problem(0.9);
  MinimizeConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  // The coarse grid needs a smaller box to keep 8 cells per blow-up length.
  cfg.half_width = cfg.n < 256 ? 7.5 : 12.0;
  cfg.max_steps = 50;
  cfg.trial_bound = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimize(p, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.max_steps);
}
BENCHMARK(BM_FlowSteps)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_TownesShooting(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_townes());
  }
}
BENCHMARK(BM_TownesShooting)->Unit(benchmark::kMillisecond);

void BM_RadialSpectrum(benchmark::State& state) {
  const RadialProfile& w = default_townes().profile;
  for (auto _ : state) {
    benchmark::DoNotOptimize(linearized_spectrum(w, LinearOp::L_hat, 1, 4));
  }
}
BENCHMARK(BM_RadialSpectrum)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
