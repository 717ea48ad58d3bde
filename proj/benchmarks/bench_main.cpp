#include <benchmark/benchmark.h>

#include "oskit/cpmaps.hpp"
#include "oskit/riesz.hpp"

using namespace oskit;

namespace {

InterpolationInstance np_instance(const OperatorSystem& system) {
  InterpolationInstance inst;
  inst.system = system;
  inst.lower = {HermMatrix::diagonal({-3, 1, -1, -1}), HermMatrix::diagonal({1, -3, -1, -1})};
  inst.upper = {HermMatrix::diagonal({2, 2, 4, 0}), HermMatrix::diagonal({2, 2, 0, 4})};
  return inst;
}

void BM_min_eig(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  DetRng rng(7);
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(rng.uniform(), rng.uniform());
  HermMatrix h(Eigen::MatrixXcd(0.5 * (a + a.adjoint().eval())));
  for (auto _ : state) benchmark::DoNotOptimize(min_eig(h));
}
BENCHMARK(BM_min_eig)->Arg(4)->Arg(8)->Arg(16);

void BM_exact_interpolation(benchmark::State& state) {
  InterpolationInstance inst = np_instance(make_standard_np());
  for (auto _ : state) {
    FeasibilityVerdict v = interpolate(inst, 1e-9);
    benchmark::DoNotOptimize(v.status);
  }
}
BENCHMARK(BM_exact_interpolation);

void BM_extension_infeasible(benchmark::State& state) {
  OperatorSystem v = make_standard_np();
  ExtensionProblem p;
  p.small = v;
  p.big = make_linf(4);
  p.codomain_dim = 1;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd c(v.dim());
    for (int k = 0; k < v.dim(); ++k)
      c[k] = v.basis[static_cast<std::size_t>(k)].diagonal_entries()[static_cast<std::size_t>(i)];
    p.maps.push_back(CpMap::from_functional(v, c));
  }
  p.sum_constraints.push_back({{0, 1}, {2, 3}});
  for (auto _ : state) {
    FeasibilityVerdict verdict = solve_extension(p, 1e-9);
    benchmark::DoNotOptimize(verdict.status);
  }
}
BENCHMARK(BM_extension_infeasible);

void BM_barrier_interpolation_m3(benchmark::State& state) {
  InterpolationInstance inst;
  inst.system = make_full(3);
  DetRng rng(11);
  Eigen::VectorXd c(inst.system.dim());
  for (int i = 0; i < c.size(); ++i) c[i] = rng.dyadic(1.0);
  HermMatrix b = inst.system.from_coords(c);
  inst.lower = {b - 1.5 * inst.system.unit};
  inst.upper = {b + 1.5 * inst.system.unit};
  for (auto _ : state) {
    FeasibilityVerdict v = interpolate(inst, 1e-9);
    benchmark::DoNotOptimize(v.status);
  }
}
BENCHMARK(BM_barrier_interpolation_m3);

void BM_campaign_instance(benchmark::State& state) {
  CampaignConfig cfg;
  cfg.instance_count = 1;
  cfg.dimension_cap = 4;
  cfg.pair_family = PairFamily::BlockDiagonalInFull;
  for (auto _ : state) {
    cfg.seed++;
    CampaignReport r = run_campaign(cfg);
    benchmark::DoNotOptimize(r.violations);
  }
}
BENCHMARK(BM_campaign_instance);

}  // namespace

BENCHMARK_MAIN();
