#include <benchmark/benchmark.h>

#include "rowspace/deep_linear.hpp"
#include "rowspace/gd_flat.hpp"
#include "rowspace/hidden_one.hpp"
#include "rowspace/riemannian.hpp"

using namespace rowspace;

namespace {

ProblemInstance problem(benchmark::State& state) {
  const Index d = state.range(0);
  return random_problem(d / 10, d, 10.0, {1, 0});
}

void BM_GdStep(benchmark::State& state) {
  const ProblemInstance p = problem(state);
  Vector y = Vector::Zero(p.d());
  for (auto _ : state) {
    y = gd_step(y, p, 1e-3);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_GdStep)->Arg(100)->Arg(1000);

// Full one-hidden-layer step costs O(d^2); the compact iteration is O(nd).
void BM_HiddenStep(benchmark::State& state) {
  const ProblemInstance p = problem(state);
  HiddenPair s = biopt_init(p, {1, 1});
  for (auto _ : state) {
    s = gd_step_hidden(s, p, 1e-3);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_HiddenStep)->Arg(100)->Arg(1000);

void BM_CompactHidden(benchmark::State& state) {
  const ProblemInstance p = problem(state);
  GdConfig cfg;
  cfg.alpha = 1e-3;
  cfg.tol_residual = 0;
  cfg.max_iters = 100;
  cfg.record_every = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(run_algorithm3(p, cfg, RngSpec{1, 1}).theta_hat.data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_CompactHidden)->Arg(100)->Arg(1000);

void BM_DeepStep(benchmark::State& state) {
  const ProblemInstance p = random_problem(10, 100, 10.0, {1, 0});
  LayerStack s = baseline_init(100, static_cast<int>(state.range(0)), BaselineKind::Identity, {1, 2});
  for (auto _ : state) {
    s = gd_step_deep(s, p, 1e-4);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_DeepStep)->Arg(2)->Arg(6);

void BM_RiemannianStep(benchmark::State& state) {
  const ProblemInstance p = random_problem(5, state.range(0), 5.0, {1, 0});
  RiemannianState s = random_riemannian_state(p.d(), 3, {1, 3});
  for (auto _ : state) {
    s = riemannian_step(s, p, 1e-3);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_RiemannianStep)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
