#include <benchmark/benchmark.h>

#include <random>

#include "fsq/core_dft.hpp"
#include "fsq/filter.hpp"
#include "fsq/hash_to_bins.hpp"
#include "fsq/set_query.hpp"

namespace {

using namespace fsq;

std::vector<cplx> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& e : v) e = {g(rng), g(rng)};
  return v;
}

void BM_Fft(benchmark::State& state) {
  const auto x = noise(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(fft(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(1 << 8, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_BuildFilter(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_filter(n, 64, 1e-3, 0.25));
}
BENCHMARK(BM_BuildFilter)->Arg(1 << 12)->Arg(1 << 14)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_HashToBins(benchmark::State& state) {
  const std::uint64_t n = 1 << 16;
  const auto B = static_cast<std::uint64_t>(state.range(0));
  const auto fp = build_filter(n, B, 1e-3, 0.25);
  const auto data = noise(n, 2);
  std::mt19937_64 rng(3);
  SparseSpectrum zhat(n);
  for (Index i = 0; i < 16; ++i) zhat.set(i * 997 % n, 1.0);
  for (auto _ : state) {
    Signal x(data);
    benchmark::DoNotOptimize(hash_to_bins(x, zhat, sample_params(rng, n), fp));
  }
}
BENCHMARK(BM_HashToBins)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_FourierSetQuery(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const std::size_t k = 8;
  std::vector<cplx> xhat(n);
  std::vector<Index> query;
  for (Index i = 0; i < k; ++i) {
    query.push_back(i * (n / k) + 3);
    xhat[query.back()] = 1.0;
  }
  const auto data = ifft(xhat);
  QueryOptions options;
  options.eps = 0.5;
  options.delta = 1e-3;
  options.constants = kPracticalConstants;
  FilterCache cache;
  std::mt19937_64 rng(4);
  for (auto _ : state) {
    Signal x(data);
    benchmark::DoNotOptimize(fourier_set_query(x, query, options, rng, &cache));
  }
}
BENCHMARK(BM_FourierSetQuery)->Arg(1 << 10)->Arg(1 << 12)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
