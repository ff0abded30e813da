#include <benchmark/benchmark.h>

#include <stmc/flow.hpp>
#include <stmc/spectral.hpp>

using namespace stmc;

namespace {

GraphSurface bent(const SphericalGrid& g, double radius) {
  Field y = real_harmonic(g, 2, 2);
  Field rho =
      Field::Constant(g.size(), radius) * (1.0 + 0.05 * y / y.abs().maxCoeff());
  return GraphSurface{Vec3::Zero(), rho.eval(), g};
}

void BM_transform_jet(benchmark::State& state) {
  SphericalGrid g = SphericalGrid::build(state.range(0), 2 * state.range(0));
  Field f = real_harmonic(g, 3, 1) + 0.2 * real_harmonic(g, 7, 4);
  for (auto _ : state) benchmark::DoNotOptimize(g.jet(f));
}

void BM_geometry(benchmark::State& state) {
  InitialDataSet ids = InitialDataSet::schwarzschild(1.0);
  SphericalGrid g = SphericalGrid::build(state.range(0), 2 * state.range(0));
  GraphSurface s = bent(g, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(geometry(s, ids));
}

void BM_flow_step(benchmark::State& state) {
  InitialDataSet ids = InitialDataSet::schwarzschild(1.0);
  SphericalGrid g = SphericalGrid::build(state.range(0), 2 * state.range(0));
  FlowState st{bent(g, 10.0), 0.0, 0};
  FlowConfig cfg;
  SurfaceGeometry geo = geometry(st.surface, ids);
  double dt = suggest_dt(geo, st_curvature(geo, trace_K(geo, ids), cfg.q), cfg.cfl);
  for (auto _ : state) benchmark::DoNotOptimize(step(st, ids, cfg, dt));
}

void BM_laplace_eigs(benchmark::State& state) {
  InitialDataSet ids = InitialDataSet::schwarzschild(1.0);
  SphericalGrid g = SphericalGrid::build(state.range(0), 2 * state.range(0));
  SurfaceGeometry geo = geometry(bent(g, 10.0), ids);
  for (auto _ : state) benchmark::DoNotOptimize(laplace_eigs(geo, 12));
}

BENCHMARK(BM_transform_jet)->Arg(24)->Arg(48);
BENCHMARK(BM_geometry)->Arg(24)->Arg(48);
BENCHMARK(BM_flow_step)->Arg(24)->Arg(48);
BENCHMARK(BM_laplace_eigs)->Arg(24)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
