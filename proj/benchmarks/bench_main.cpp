#include <benchmark/benchmark.h>

#include <cmath>

#include "fvvisc/diffusion1d.hpp"
#include "fvvisc/ns3d.hpp"

using namespace fvvisc;

namespace {

std::vector<Vec5> manufactured_states(const Mesh3D& mesh) {
  std::vector<Vec5> w;
  for (const TetCell& c : mesh.cells()) w.push_back(manufactured_primitive(c.centroid));
  return w;
}

void BM_RoeFlux(benchmark::State& state) {
  const FlowConfig cfg;
  Vec5 l, r;
  l << 1.0, 0.3, 0.2, 0.1, 1.0;
  r << 1.1, 0.25, 0.22, 0.05, 1.05;
  const Vec3 n = Vec3(1.0, 2.0, 2.0).normalized();
  for (auto _ : state) {
    benchmark::DoNotOptimize(roe_flux(l, r, n, cfg));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_RoeFlux);

void BM_LsqGradient(benchmark::State& state) {
  const Mesh3D mesh = generate_tet_mesh(state.range(0));
  const LsqGradient3D lsq(mesh);
  const auto w = manufactured_states(mesh);
  std::vector<StateGradient> grads(w.size());
  for (auto _ : state) {
    lsq.compute(w, grads);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * mesh.num_cells());
}
BENCHMARK(BM_LsqGradient)->Arg(7)->Arg(11)->Arg(15);

void BM_ResidualNS3D(benchmark::State& state) {
  const NS3DProblem p(generate_tet_mesh(state.range(0)), ReconstructionStrategy::arithmetic());
  const auto w = manufactured_states(p.mesh());
  for (auto _ : state) benchmark::DoNotOptimize(p.residual(w));
  state.SetItemsProcessed(state.iterations() * p.size());
}
BENCHMARK(BM_ResidualNS3D)->Arg(7)->Arg(11)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_Residual1D(benchmark::State& state) {
  const Diffusion1DProblem p(generate_grid_1d(state.range(0), false), ReconstructionStrategy::lr_average());
  const auto u = p.exact_cell_values();
  for (auto _ : state) benchmark::DoNotOptimize(p.residual(u));
  state.SetItemsProcessed(state.iterations() * p.size());
}
BENCHMARK(BM_Residual1D)->Arg(63)->Arg(1023);

}  // namespace

BENCHMARK_MAIN();
