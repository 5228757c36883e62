#include <benchmark/benchmark.h>

#include <random>

#include "sbrisk/empirical_process.hpp"
#include "sbrisk/erm.hpp"
#include "sbrisk/geometry.hpp"

namespace {

sbrisk::Vector gaussian_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> g;
  sbrisk::Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = g(eng);
  return v;
}

void BM_ProjectL1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const sbrisk::Vector v = gaussian_vector(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sbrisk::project_l1(v, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProjectL1)->RangeMultiplier(4)->Range(16, 16384)->Complexity(benchmark::oNLogN);

void BM_SupportL1L2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const sbrisk::Vector z = gaussian_vector(n, 2);
  const sbrisk::BallIntersection set{2.0, 0.3, n};
  for (auto _ : state) benchmark::DoNotOptimize(sbrisk::support_l1l2(z, set));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SupportL1L2)->RangeMultiplier(4)->Range(16, 16384)->Complexity(benchmark::oNLogN);

void BM_SolveErm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto N = static_cast<std::size_t>(state.range(1));
  const sbrisk::ClassSpec cls = sbrisk::ClassSpec::centred(n, 1.0);
  const sbrisk::Sample s =
      sbrisk::draw_sample(cls, sbrisk::DesignSpec::rademacher(n), sbrisk::NoiseSpec::scaled_sign(0.5), N, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sbrisk::solve_erm(s, cls));
}
BENCHMARK(BM_SolveErm)->Args({64, 512})->Args({64, 4096})->Args({256, 1024})->Unit(benchmark::kMillisecond);

void BM_ExpectedRademacherSup(benchmark::State& state) {
  sbrisk::LocalizedSupConfig c;
  c.cls = sbrisk::ClassSpec::centred(64, 1.0);
  c.design = sbrisk::DesignSpec::rademacher(64);
  c.N = static_cast<std::size_t>(state.range(0));
  c.trials = 200;
  c.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sbrisk::expected_rademacher_sup(c, 0.5));
}
BENCHMARK(BM_ExpectedRademacherSup)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
