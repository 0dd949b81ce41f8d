#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "behave/kernels.hpp"
#include "behave/rng.hpp"
#include "behave/stats.hpp"
#include "behave/synth.hpp"

using namespace behave;

namespace {

const std::vector<std::string>& suite_texts() {
  static const std::vector<std::string> texts = [] {
    const auto suite = synth_hatecheck(1);
    std::vector<std::string> t;
    for (const auto& c : suite.cases()) t.push_back(c.text);
    return t;
  }();
  return texts;
}

FeatureConfig bench_features() {
  FeatureConfig fc;
  fc.dimension = 1u << 18;
  return fc;
}

void BM_FeaturizeSerial(benchmark::State& state) {
  const auto fc = bench_features();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::featurize_serial(suite_texts(), fc));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(suite_texts().size()));
}

void BM_FeaturizeParallel(benchmark::State& state) {
  const auto fc = bench_features();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::featurize_parallel(suite_texts(), fc));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(suite_texts().size()));
}

template <bool Parallel>
void BM_Predict(benchmark::State& state) {
  const auto fc = bench_features();
  const auto xs = kernels::featurize_parallel(suite_texts(), fc);
  Rng rng(1);
  std::vector<double> params(2 * static_cast<std::size_t>(fc.dimension) + 2);
  for (auto& p : params) p = rng.normal();
  std::vector<double> out(xs.size());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::predict_parallel(params, fc.dimension, xs, out);
    else kernels::predict_serial(params, fc.dimension, xs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}

template <bool Parallel>
void BM_AdamW(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<double> params(n), grad(n), m(n, 0.0), v(n, 0.0);
  for (auto& g : grad) g = rng.normal();
  const kernels::AdamWParams p;
  std::int64_t t = 0;
  for (auto _ : state) {
    ++t;
    if constexpr (Parallel) kernels::adamw_step_parallel(params, grad, m, v, p, t, n - 2);
    else kernels::adamw_step_serial(params, grad, m, v, p, t, n - 2);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_Randomization(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Label> a(n), b(n), gold(n);
  for (std::size_t i = 0; i < n; ++i) {
    gold[i] = rng.coin() ? Label::Hateful : Label::NonHateful;
    a[i] = rng.uniform() < 0.8 ? gold[i] : (rng.coin() ? Label::Hateful : Label::NonHateful);
    b[i] = rng.uniform() < 0.75 ? gold[i] : (rng.coin() ? Label::Hateful : Label::NonHateful);
  }
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(randomization_exceed_count_parallel(a, b, gold, 10000, 1));
    else benchmark::DoNotOptimize(randomization_exceed_count_serial(a, b, gold, 10000, 1));
  }
}

}  // namespace

BENCHMARK(BM_FeaturizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeaturizeParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_TEMPLATE(BM_Predict, false)->Unit(benchmark::kMicrosecond);
BENCHMARK_TEMPLATE(BM_Predict, true)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK_TEMPLATE(BM_AdamW, false)->Arg(1 << 16)->Arg(1 << 19)->Unit(benchmark::kMicrosecond);
BENCHMARK_TEMPLATE(BM_AdamW, true)->Arg(1 << 16)->Arg(1 << 19)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK_TEMPLATE(BM_Randomization, false)->Arg(932)->Arg(2479)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Randomization, true)->Arg(932)->Arg(2479)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
