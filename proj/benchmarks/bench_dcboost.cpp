#include <benchmark/benchmark.h>

#include "dcboost/imaging.hpp"
#include "dcboost/solver.hpp"
#include "dcboost/toy_problems.hpp"
#include "dcboost/tv_cauchy.hpp"

namespace {

using namespace dcboost;

void BM_TvProx(benchmark::State& state) {
  const auto n = state.range(0);
  const ImageGrid v = add_cauchy_noise(make_squares_image(n, n), {3.0, 1});
  PdConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tv_prox(v, 1.83, cfg));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_TvProx)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_GradDiv(benchmark::State& state) {
  const auto n = state.range(0);
  const ImageGrid u = make_squares_image(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(div(grad(u)));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GradDiv)->Arg(256)->Arg(512);

void BM_ToySolve(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  const ScadSeparableProblem model;
  SolverConfig cfg;
  cfg.variant = variant;
  cfg.alpha = 0.2;
  cfg.beta = 0.7;
  cfg.lambda_bar = variant == Variant::kNmBdca ? 2.0 : 3.0;
  const Vector x0 = Eigen::Vector2d(2.2, 0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(model, x0, cfg));
  }
  state.SetLabel(std::string(to_string(variant)));
}
BENCHMARK(BM_ToySolve)
    ->Arg(static_cast<int>(Variant::kDca))
    ->Arg(static_cast<int>(Variant::kNmBdca))
    ->Arg(static_cast<int>(Variant::kIbdca));

void BM_Basin(benchmark::State& state) {
  SolverConfig cfg;
  cfg.variant = Variant::kIbdca;
  cfg.alpha = 0.2;
  cfg.beta = 0.7;
  cfg.lambda_bar = 3.0;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(basin_experiment(2000, 7, cfg, threads));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_Basin)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Denoise(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  const ImageGrid clean = make_squares_image(64, 64);
  const ImageGrid f = add_cauchy_noise(clean, {3.0, 7});
  const CauchyModel model(f, 15.0, 3.0, 1.83);
  SolverConfig cfg;
  cfg.variant = variant;
  cfg.alpha = 0.9 * model.rho();
  cfg.beta = 0.5;
  cfg.lambda_bar = variant == Variant::kIbdca ? 10.0 : 9.0;
  cfg.max_outer_iter = 200;
  cfg.tol_rel_energy = 5e-4;
  cfg.tol_direction = 1e-6;
  int iterations = 0;
  for (auto _ : state) {
    const SolveResult r = solve(model, f.to_vector(), cfg);
    iterations = r.iterations();
  }
  state.counters["outer_iters"] = iterations;
  state.SetLabel(std::string(to_string(variant)));
}
BENCHMARK(BM_Denoise)
    ->Arg(static_cast<int>(Variant::kDca))
    ->Arg(static_cast<int>(Variant::kNmBdca))
    ->Arg(static_cast<int>(Variant::kIbdca))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
