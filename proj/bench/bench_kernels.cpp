// Serial reference path against the OpenMP path for the hot kernels.
#include <benchmark/benchmark.h>

#include <map>

#include "shellred/compare.hpp"
#include "shellred/minimizer.hpp"

using namespace shellred;

namespace {

struct Fixture {
  ReferenceField ref;
  Material mat{1.0, 1.0, 0.05};
  std::vector<Vec3> m;
  std::vector<Jetd> mjets;

  explicit Fixture(int n) {
    SurfaceChart c = make_sphere_cap(1.0, 0.5);
    Grid g = chart_grid(c, n, n);
    ref = build_reference(c, g, mat.h);
    m = sample_nodes(c, g);
    for (Vec3& p : m) p = test_deformation(p, 0.05);
    mjets = finite_difference_derivatives(g, m, 4);
  }
};

const Fixture& fixture(int n) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Fixture(n)).first;
  return it->second;
}

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_InternalEnergy(benchmark::State& s) {
  const Fixture& f = fixture(int(s.range(0)));
  EnergyOptions o;
  for (auto _ : s) benchmark::DoNotOptimize(internal_energy(f.mjets, f.ref, f.mat, o, exec_of(s)).total);
}

void BM_Gradient(benchmark::State& s) {
  const Fixture& f = fixture(int(s.range(0)));
  BoundarySpec bc;
  ShellProblem p(f.ref, f.mat, bc, NodalLoad{}, SolverConfig{});
  std::vector<Vec3> g;
  for (auto _ : s) benchmark::DoNotOptimize(p.gradient(f.m, g, exec_of(s)));
}

void BM_Integrate3D(benchmark::State& s) {
  const Fixture& f = fixture(int(s.range(0)));
  auto quad = ThicknessQuadrature::gauss(16, f.mat.h);
  for (auto _ : s) benchmark::DoNotOptimize(integrate_3d(f.mjets, f.ref, f.mat, quad, exec_of(s)).total);
}

void grid_sizes(benchmark::internal::Benchmark* b) {
  b->ArgNames({"n", "parallel"});
  for (int n : {33, 65, 129})
    for (int par : {0, 1}) b->Args({n, par});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_InternalEnergy)->Apply(grid_sizes);
BENCHMARK(BM_Gradient)->Apply(grid_sizes);
BENCHMARK(BM_Integrate3D)->Apply(grid_sizes);

BENCHMARK_MAIN();
