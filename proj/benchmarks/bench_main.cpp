#include <benchmark/benchmark.h>

#include "inlm/cg.hpp"
#include "inlm/elliptic.hpp"
#include "inlm/nn.hpp"
#include "inlm/rng.hpp"

namespace {

void BM_StencilApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  inlm::Rng rng(1);
  const auto c = rng.uniform_vector(static_cast<std::size_t>(n) * n, 0.0, 10.0);
  const auto v = rng.normal_vector(static_cast<std::size_t>(n) * n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(inlm::stencil_apply(n, c, v));
  }
}
BENCHMARK(BM_StencilApply)->Arg(32)->Arg(64)->Arg(100);

void BM_PdeForwardSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto phantom = inlm::make_phantom(n);
  const auto prob = inlm::EllipticProblem::make(n, phantom.g_grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(inlm::forward_solve(prob, phantom.c_true));
  }
}
BENCHMARK(BM_PdeForwardSolve)->Arg(16)->Arg(32);

void BM_CgNormalSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto phantom = inlm::make_phantom(n);
  const inlm::EllipticModel model(
      inlm::EllipticProblem::make(n, phantom.g_grid));
  const inlm::Vector c0(model.domain_dim(), 0.0);
  const auto residual = inlm::sub(phantom.u_true, model.apply(c0));
  inlm::CgConfig cfg;
  cfg.max_iters = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        inlm::cg_normal_solve(model, c0, residual, 2.0, cfg));
  }
}
BENCHMARK(BM_CgNormalSolve)->Arg(16)->Arg(32);

void BM_NnEpochStep(benchmark::State& state) {
  const auto ds = inlm::synth_dataset(static_cast<std::size_t>(state.range(0)),
                                      0, 14, 0.01, 7);
  const inlm::NnModel model(ds.prob);
  inlm::Rng rng(3);
  const auto p = rng.uniform_vector(model.domain_dim(), -1.0, 1.0);
  const auto residual = inlm::sub(ds.prob.targets, model.apply(p));
  inlm::CgConfig cfg;
  cfg.max_iters = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inlm::cg_normal_solve(model, p, residual, 1.0, cfg));
  }
}
BENCHMARK(BM_NnEpochStep)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
