#include <random>

#include <benchmark/benchmark.h>

#include "subfinsler/certify.hpp"
#include "subfinsler/normal_flow.hpp"

using namespace subfinsler;

namespace {

Covector random_covector(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Covector c(d);
  for (int i = 0; i < d; ++i) c(i) = g(rng);
  return c;
}

void BM_DualNorm(benchmark::State& state) {
  const NormSpec norms[] = {NormSpec::linf(3), NormSpec::so3(), NormSpec::root_sum(3)};
  const NormSpec& n = norms[state.range(0)];
  std::mt19937_64 rng(1);
  const Covector eta = random_covector(rng, 3);
  for (auto _ : state) benchmark::DoNotOptimize(n.dual_norm(eta));
}
BENCHMARK(BM_DualNorm)->Arg(0)->Arg(1)->Arg(2);

void BM_FaceOf(benchmark::State& state) {
  const NormSpec n = NormSpec::linf(3);
  std::mt19937_64 rng(2);
  const Covector xi = random_covector(rng, 3);
  for (auto _ : state) benchmark::DoNotOptimize(n.polyhedron().face_of(xi).id);
}
BENCHMARK(BM_FaceOf);

void BM_PolyhedralHeisenberg(benchmark::State& state) {
  const GroupSpec g = GroupSpec::heisenberg();
  const NormSpec n = NormSpec::linf(3);
  std::mt19937_64 rng(3);
  Covector lam = random_covector(rng, 3);
  lam /= n.dual_norm(lam);
  FlowOptions opt;
  opt.horizon = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_polyhedral(g, n, lam, g.identity(), opt).size());
}
BENCHMARK(BM_PolyhedralHeisenberg)->Unit(benchmark::kMillisecond);

void BM_SmoothSO3(benchmark::State& state) {
  const GroupSpec g = GroupSpec::so3();
  const NormSpec n = NormSpec::so3();
  Covector lam(3);
  lam << 1.0, 0.25, -0.3;
  FlowOptions opt;
  opt.horizon = 3.0;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_smooth(g, n, lam, g.identity(), opt).size());
}
BENCHMARK(BM_SmoothSO3)->Unit(benchmark::kMillisecond);

void BM_MOfRSampled(benchmark::State& state) {
  const GroupSpec g = GroupSpec::affine();
  const NormSpec n = NormSpec::corner(2, 1);
  MOptions opt;
  opt.radial_step = 0.5;
  opt.directions = 8;
  for (auto _ : state) benchmark::DoNotOptimize(M_of_r(g, n, 1.0, n, opt).value);
}
BENCHMARK(BM_MOfRSampled)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
