#include <benchmark/benchmark.h>

#include <random>

#include "rcurv/ambient.hpp"
#include "rcurv/contraction.hpp"
#include "rcurv/integrate.hpp"
#include "rcurv/invariants.hpp"
#include "rcurv/kronecker.hpp"

using namespace rcurv;

namespace {

Tensor identity(int n, Variance v) {
  Tensor g(n, {v, v});
  for (int i = 0; i < n; ++i) g({i, i}) = 1.0;
  return g;
}

void BM_ContractionGreedy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Tensor w = random_weyl(n, 1), g = identity(n, Variance::Lower), gi = identity(n, Variance::Upper);
  for (auto _ : state) benchmark::DoNotOptimize(contract("abcd,cefg,dgbh->aefh", {&w, &w, &w}, g, gi));
}
BENCHMARK(BM_ContractionGreedy)->Arg(4)->Arg(6)->Arg(8)->ArgNames({"n"});

// Cubic Weyl scalar under each schedule; the naive loop is the oracle, not a contender.
void BM_CubicSchedule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto schedule = static_cast<Schedule>(state.range(1));
  const Tensor w = random_weyl(n, 1), g = identity(n, Variance::Lower), gi = identity(n, Variance::Upper);
  for (auto _ : state)
    benchmark::DoNotOptimize(contract_scalar("abcd,cdef,efab", {&w, &w, &w}, g, gi, {schedule, 0}));
}
BENCHMARK(BM_CubicSchedule)
    ->Args({4, static_cast<int>(Schedule::Greedy)})
    ->Args({5, static_cast<int>(Schedule::Greedy)})
    ->Args({4, static_cast<int>(Schedule::Naive)})
    ->ArgNames({"n", "schedule"})
    ->Unit(benchmark::kMicrosecond);

void BM_PfaffianWeyl(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), l = static_cast<int>(state.range(1));
  const Tensor w = random_weyl(n, 2), gi = identity(n, Variance::Upper);
  for (auto _ : state) benchmark::DoNotOptimize(pf_ell(w, l, gi));
}
BENCHMARK(BM_PfaffianWeyl)->Args({4, 2})->Args({6, 3})->Args({8, 4})->ArgNames({"n", "l"});

void BM_PfaffianBruteForce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), l = static_cast<int>(state.range(1));
  const Tensor mixed = mixed_curvature(random_weyl(n, 3), identity(n, Variance::Upper));
  for (auto _ : state) benchmark::DoNotOptimize(pf_ell_brute_force(mixed, l));
}
BENCHMARK(BM_PfaffianBruteForce)->Args({4, 2})->Args({6, 3})->ArgNames({"n", "l"});

void BM_WeylBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), k = static_cast<int>(state.range(1));
  const Tensor w = random_weyl(n, 4), g = identity(n, Variance::Lower), gi = identity(n, Variance::Upper);
  for (auto _ : state) benchmark::DoNotOptimize(weyl_basis(w, g, gi, k));
}
BENCHMARK(BM_WeylBasis)->Args({8, 2})->Args({8, 3})->Args({8, 4})->ArgNames({"n", "k"});

void BM_KroneckerRecursion(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0)), n = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kronecker_trace_recursion(k, n));
}
BENCHMARK(BM_KroneckerRecursion)->Args({3, 6})->Args({5, 8})->Args({8, 8})->ArgNames({"k", "n"})->Unit(benchmark::kMillisecond);

void BM_JetProduct(benchmark::State& state) {
  const int vars = static_cast<int>(state.range(0)), order = static_cast<int>(state.range(1));
  const auto space = JetSpace::get(vars, order);
  const Jet x = sin(Jet::variable(*space, 0, 0.3, order)) + Jet::variable(*space, vars - 1, 0.2, order);
  const Jet y = exp(Jet::variable(*space, 1, -0.1, order));
  for (auto _ : state) benchmark::DoNotOptimize(x * y);
}
BENCHMARK(BM_JetProduct)->Args({4, 2})->Args({4, 4})->Args({6, 4})->Args({6, 6})->ArgNames({"vars", "order"});

void BM_Curvature(benchmark::State& state) {
  const auto m = model_by_name(state.range(0) == 0 ? "cp2" : "perturbed-s4");
  const int order = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(m.curvature(m.base_point, order).weyl());
}
BENCHMARK(BM_Curvature)->ArgsProduct({{0, 1}, {2, 4}})->ArgNames({"perturbed", "order"});

void BM_AmbientRicci(benchmark::State& state) {
  const auto chart = build_ambient(model_by_name(state.range(0) == 4 ? "cp2" : "s2^3"));
  std::mt19937_64 rng(5);
  const auto p = chart.random_point(rng);
  for (auto _ : state) benchmark::DoNotOptimize(ambient_ricci(chart, p));
}
BENCHMARK(BM_AmbientRicci)->Arg(4)->Arg(6)->ArgNames({"n"});

void BM_AmbientRoute(benchmark::State& state) {
  const auto m = model_by_name(state.range(0) == 6 ? "s2^3" : "s2^4");
  const auto chart = build_ambient(m);
  for (auto _ : state) benchmark::DoNotOptimize(p_ell_n_ambient(chart, 2, m.base_point));
}
BENCHMARK(BM_AmbientRoute)->Arg(6)->Arg(8)->ArgNames({"n"})->Unit(benchmark::kMillisecond);

void BM_QuadratureWeylNorm(benchmark::State& state) {
  const auto m = model_by_name("perturbed-s4");
  const int nodes = static_cast<int>(state.range(0));
  const auto f = [&](std::span<const double> x) {
    const Curvature geo = m.curvature(x, 2);
    return squared_norm(values(geo.weyl()), values(geo.inverse_metric()));
  };
  for (auto _ : state) benchmark::DoNotOptimize(integrate_scalar(f, m, {nodes, false}));
}
BENCHMARK(BM_QuadratureWeylNorm)->Arg(4)->Arg(8)->ArgNames({"nodes"})->Unit(benchmark::kMillisecond);

void BM_RenormalizedVolume(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(renormalized_volume(n));
}
BENCHMARK(BM_RenormalizedVolume)->Arg(4)->Arg(8)->Arg(16)->ArgNames({"n"});

}  // namespace

BENCHMARK_MAIN();
