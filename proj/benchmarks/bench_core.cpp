#include <cocyclelab/certify.hpp>
#include <cocyclelab/families.hpp>
#include <cocyclelab/livsic.hpp>
#include <cocyclelab/lyapunov.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace cocyclelab;

namespace {

MatrixGenerator random_generator(const Sft& s, int d, int r, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal;
  MatrixGenerator::Table t;
  for (const auto& w : admissible_words(s, 2 * r + 1)) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = normal(eng) / d;
    t.emplace(w, m);
  }
  return MatrixGenerator(s, d, r, t);
}

void BM_CocycleProduct(benchmark::State& state) {
  const Sft s = Sft::full_shift(2);
  const auto g = random_generator(s, static_cast<int>(state.range(0)), 1, 1);
  const auto x = transitive_point(s, 10);
  for (auto _ : state) benchmark::DoNotOptimize(cocycle_product(g, x, 1000));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_CocycleProduct)->Arg(2)->Arg(4)->Arg(8);

void BM_EstimateSpectrum(benchmark::State& state) {
  const Sft s = Sft::full_shift(2);
  const auto g = random_generator(s, static_cast<int>(state.range(0)), 1, 2);
  const auto mu = ErgodicMeasure::bernoulli(s, {0.5, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(estimate_spectrum(g, mu, 10000, 3));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_EstimateSpectrum)->Arg(2)->Arg(3)->Arg(5);

void BM_SupLogNormProfile(benchmark::State& state) {
  const Sft s = Sft::full_shift(2);
  const auto g = random_generator(s, 2, 1, 4);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sup_log_norm_profile(g, n));
}
BENCHMARK(BM_SupLogNormProfile)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_EnumerateOrbits(benchmark::State& state) {
  const Sft s = Sft::full_shift(2);
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_periodic_orbits(s, p));
}
BENCHMARK(BM_EnumerateOrbits)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
  const auto g = rotation_by_symbol(Sft::full_shift(2), {0.4, 1.7});
  const CertificateInput in{.rho = 0.01, .tau = 0.01, .max_period = static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(certify_invertibility(g, in));
}
BENCHMARK(BM_Certify)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SolveCoboundary(benchmark::State& state) {
  const Sft s = Sft::full_shift(2);
  std::map<Word, Matrix> p;
  p.emplace(Word{0}, Matrix{{2.0, 1.0}, {0.0, 1.0}});
  p.emplace(Word{1}, Matrix{{1.0, 0.0}, {1.0, 3.0}});
  const auto g = coboundary_generator(s, 0, p);
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_coboundary(g, depth, 1000000));
}
BENCHMARK(BM_SolveCoboundary)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
