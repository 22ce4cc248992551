#include <benchmark/benchmark.h>

#include "magvirial/dynamics.hpp"

using namespace magvirial;

namespace {

PotentialSpec tapered(int n, double extent) {
  PotentialSpec s = linear_magnetic_spec(n, extent);
  s.electric = ElectricFamily::inverse_quadratic;
  s.coupling = 0.5;
  return s;
}

void BM_Fft(benchmark::State& state) {
  const Grid g(2, 10.0, static_cast<int>(state.range(0)));
  ComplexField u = random_smooth_field(g, 1);
  for (auto _ : state) {
    g.forward(u.data(), u.data());
    g.inverse(u.data(), u.data());
    benchmark::DoNotOptimize(u.data());
  }
  state.SetItemsProcessed(static_cast<long>(state.iterations() * g.size()));
}
BENCHMARK(BM_Fft)->Arg(64)->Arg(128)->Arg(256);

void BM_NlsRhs(benchmark::State& state) {
  const Grid g(2, 10.0, static_cast<int>(state.range(0)));
  const DiscreteHamiltonian H(tapered(2, 10.0), g);
  RhsEvaluator eval(H, 3.0, true);
  const ComplexField u = random_smooth_field(g, 2);
  ComplexField out(g);
  for (auto _ : state) {
    eval.apply(u, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<long>(state.iterations() * g.size()));
}
BENCHMARK(BM_NlsRhs)->Arg(64)->Arg(128)->Arg(256);

void BM_Rk4Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int points = static_cast<int>(state.range(1));
  const Grid g(n, 10.0, points);
  const DiscreteHamiltonian H(tapered(n, 10.0), g);
  Integrator integ(H, Equation::schrodinger, 3.0, true);
  SimState s{0.0, random_smooth_field(g, 3), std::nullopt, 0, false};
  for (auto _ : state) benchmark::DoNotOptimize(integ.step(s, 1e-4));
  state.SetItemsProcessed(static_cast<long>(state.iterations() * g.size()));
}
BENCHMARK(BM_Rk4Step)->Args({2, 128})->Args({2, 256})->Args({3, 32})->Args({3, 64});

void BM_Record(benchmark::State& state) {
  const Grid g(2, 10.0, static_cast<int>(state.range(0)));
  const DiscreteHamiltonian H(tapered(2, 10.0), g);
  const VirialWeights w = VirialWeights::from(H);
  const ComplexField u = random_smooth_field(g, 4);
  for (auto _ : state) benchmark::DoNotOptimize(make_record(0.0, u, nullptr, H, w, 3.0, Equation::schrodinger));
}
BENCHMARK(BM_Record)->Arg(128)->Arg(256);

}  // namespace
BENCHMARK_MAIN();
