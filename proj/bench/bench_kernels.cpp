// Serial vs OpenMP timings of the Monte-Carlo kernels. The second benchmark
// argument selects the execution mode (0 serial, 1 parallel); results are
// bit-identical across modes, only the wall time differs.

#include "affgeom/core/volume.hpp"
#include "affgeom/dual/dual.hpp"
#include "affgeom/functionals/functionals.hpp"
#include "affgeom/funcspace/function.hpp"

#include <benchmark/benchmark.h>

using namespace affgeom;

namespace {

Budget make_budget(const benchmark::State& state) {
  Budget b;
  b.samples = state.range(0);
  b.seed = 7;
  b.exec = state.range(1) ? Exec::Parallel : Exec::Serial;
  return b;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) ? "openmp" : "serial");
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_IpBalls3(benchmark::State& state) {
  const std::vector<ConvexBody> balls(3, ConvexBody::ball(3));
  const Budget b = make_budget(state);
  for (auto _ : state) benchmark::DoNotOptimize(I_p(balls, 2.0, b));
  label(state);
}

void BM_IpMixed3(benchmark::State& state) {
  const std::vector<ConvexBody> Ls = {ConvexBody::cube(3), ConvexBody::lq_ball(3, 4.0), ConvexBody::centered_simplex(3)};
  const Budget b = make_budget(state);
  for (auto _ : state) benchmark::DoNotOptimize(I_p(Ls, 1.0, b));
  label(state);
}

void BM_NpBodyTable3(benchmark::State& state) {
  const std::vector<ConvexBody> Ls = {ConvexBody::cube(3), ConvexBody::ball(3)};
  const Budget b = make_budget(state);
  const auto rule = shared_rule(3);
  for (auto _ : state) benchmark::DoNotOptimize(N_p_body(Ls, 1.0, rule, b));
  label(state);
}

void BM_RejectionVolume3(benchmark::State& state) {
  const ConvexBody L = ConvexBody::lq_ball(3, 1.5);
  const Budget b = make_budget(state);
  for (auto _ : state) benchmark::DoNotOptimize(volume(L, b, VolumeBackend::RejectionMC));
  label(state);
}

void BM_ITildeSphere3(benchmark::State& state) {
  Mat A = Mat::Identity(3, 3);
  A(0, 0) = 1.4;
  A(1, 1) = 0.8;
  const std::vector<ConvexBody> Ls = {ConvexBody::ellipsoid(A), ConvexBody::ball(3), ConvexBody::ellipsoid(A)};
  const Budget b = make_budget(state);
  for (auto _ : state) benchmark::DoNotOptimize(I_tilde_p(Ls, 1.0, b, TildeBackend::Sphere));
  label(state);
}

void BM_OmegaFunction2(benchmark::State& state) {
  const CompactFunction l = random_bumps(2, 3, 5);
  const Budget b = make_budget(state);
  for (auto _ : state) benchmark::DoNotOptimize(omega_p_function(l, 1.0, b));
  label(state);
}

void modes(benchmark::internal::Benchmark* bm) {
  for (std::int64_t samples : {100'000, 1'000'000})
    for (int mode : {0, 1}) bm->Args({samples, mode});
  bm->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_IpBalls3)->Apply(modes);
BENCHMARK(BM_IpMixed3)->Apply(modes);
BENCHMARK(BM_NpBodyTable3)->Apply(modes);
BENCHMARK(BM_RejectionVolume3)->Apply(modes);
BENCHMARK(BM_ITildeSphere3)->Apply(modes);
BENCHMARK(BM_OmegaFunction2)->Apply(modes);

BENCHMARK_MAIN();
