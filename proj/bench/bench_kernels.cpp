#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "robustsum/duality.hpp"
#include "robustsum/function_family.hpp"
#include "robustsum/kernels.hpp"

namespace {

using namespace robustsum;

std::vector<double> random_terms(std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> t(n);
  for (auto& v : t) v = u(rng);
  return t;
}

void BM_MaxSubsetSumSerial(benchmark::State& state) {
  const auto terms = random_terms(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::max_subset_sum_serial(terms));
}

void BM_MaxSubsetSumParallel(benchmark::State& state) {
  const auto terms = random_terms(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::max_subset_sum(terms));
}

double subset_work(kernels::Mask m, const std::vector<double>& terms) {
  double s = 0;
  for (std::size_t i : kernels::mask_indices(m)) s += std::sin(terms[i - 1] * static_cast<double>(i));
  return s;
}

void BM_MapSubsetsSerial(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto terms = random_terms(n);
  const auto masks = kernels::subset_masks(n, n);
  for (auto _ : state) {
    auto r = kernels::map_subsets_serial<double>(masks, [&](kernels::Mask m) { return subset_work(m, terms); });
    benchmark::DoNotOptimize(r.data());
  }
}

void BM_MapSubsetsParallel(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto terms = random_terms(n);
  const auto masks = kernels::subset_masks(n, n);
  for (auto _ : state) {
    auto r = kernels::map_subsets<double>(masks, [&](kernels::Mask m) { return subset_work(m, terms); });
    benchmark::DoNotOptimize(r.data());
  }
}

void BM_PhiAffine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto t = random_terms(2 * n);
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back({std::round(4 * t[2 * i]), t[2 * i + 1]});
  auto fam = std::make_shared<const FunctionFamily>(affine_family(rows));
  const DualityProblem problem(fam);
  const Vector y{1.0};
  for (auto _ : state) benchmark::DoNotOptimize(phi_eval(problem, y).value.lo);
}

}  // namespace

BENCHMARK(BM_MaxSubsetSumSerial)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_MaxSubsetSumParallel)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_MapSubsetsSerial)->Arg(12)->Arg(16);
BENCHMARK(BM_MapSubsetsParallel)->Arg(12)->Arg(16);
BENCHMARK(BM_PhiAffine)->Arg(8)->Arg(12);

BENCHMARK_MAIN();
