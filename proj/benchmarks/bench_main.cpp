#include <benchmark/benchmark.h>

#include "hjb/conjugate.hpp"
#include "hjb/dp.hpp"
#include "hjb/model.hpp"

namespace {

void BM_EvalHamiltonian(benchmark::State& state) {
  const auto var = hjb::ModelVariant::original();
  double p = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hjb::eval_hamiltonian({0.63, 0.21}, p, var));
    p += 1e-9;
  }
}
BENCHMARK(BM_EvalHamiltonian);

void BM_EvalLagrangian(benchmark::State& state) {
  const auto var = hjb::ModelVariant::approx(10);
  double v = -1.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hjb::eval_lagrangian({0.63, 0.21}, v, var));
    v += 1e-9;
  }
}
BENCHMARK(BM_EvalLagrangian);

void BM_EvalVn(benchmark::State& state) {
  double x = -0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hjb::eval_Vn(10, {0.4, x}));
    x += 1e-9;
  }
}
BENCHMARK(BM_EvalVn);

void BM_StepRunCost(benchmark::State& state) {
  const auto var = hjb::ModelVariant::original();
  double x = 0.29;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hjb::step_run_cost(0.3, x, 2.0, 0.005, var));
    x += 1e-9;
  }
}
BENCHMARK(BM_StepRunCost);

void BM_DiscreteConjugate(benchmark::State& state) {
  const hjb::Grid1D v_grid(-2.0, 2.0, static_cast<int>(state.range(0)));
  const auto samples =
      hjb::sample_lagrangian({0.75, 0.25}, v_grid, hjb::ModelVariant::original());
  double p = -5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hjb::discrete_conjugate(samples, p));
    p += 1e-2;
    if (p > 5.0) p = -5.0;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DiscreteConjugate)->Arg(1001)->Arg(4001);

void BM_SolveDp(benchmark::State& state) {
  const hjb::GridSpec grid{51, -5.0, 7.0, 601, 21, 0.25};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        hjb::solve_dp(grid, hjb::ModelVariant::original(), hjb::Horizon{}, std::nullopt, 1));
  }
}
BENCHMARK(BM_SolveDp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
