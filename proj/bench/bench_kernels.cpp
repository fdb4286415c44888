// Serial reference kernels against their OpenMP counterparts, plus the two
// pipelines end to end in each execution mode.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "otlp/io.hpp"
#include "otlp/kernels.hpp"
#include "otlp/mpc.hpp"
#include "otlp/packing.hpp"

namespace {

using otlp::ExecMode;

otlp::SparseMatrix random_rows(std::size_t rows, std::size_t cols, std::size_t per_row) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::int32_t> col(0, static_cast<std::int32_t>(cols) - 1);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  otlp::SparseMatrix a(cols);
  std::vector<otlp::SparseEntry> row(per_row);
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto& e : row) e = {col(rng), val(rng)};
    a.add_row(row);
  }
  return a;
}

void BM_Multiply(benchmark::State& state) {
  const auto mode = static_cast<ExecMode>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const otlp::SparseMatrix a = random_rows(n, n, 64);
  std::vector<double> x(n, 0.5), out(n);
  for (auto _ : state) {
    otlp::kernels::multiply(mode, a, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nonzeros()));
}

void BM_ExpShifted(benchmark::State& state) {
  const auto mode = static_cast<ExecMode>(state.range(0));
  std::vector<double> v(static_cast<std::size_t>(state.range(1)), 0.25), out(v.size());
  for (auto _ : state) {
    otlp::kernels::exp_shifted(mode, v, 3.0, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Sum(benchmark::State& state) {
  const auto mode = static_cast<ExecMode>(state.range(0));
  std::vector<double> v(static_cast<std::size_t>(state.range(1)), 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(otlp::kernels::sum(mode, v));
}

void BM_MpcPipeline(benchmark::State& state) {
  const auto mode = static_cast<ExecMode>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const otlp::Instance inst = otlp::generate_instance(n, n, otlp::CostModel::kUniform01, 3);
  for (auto _ : state) benchmark::DoNotOptimize(otlp::additive_approx_mpc(inst, 0.05, mode));
}

void BM_PackingPipeline(benchmark::State& state) {
  const auto mode = static_cast<ExecMode>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const otlp::Instance inst = otlp::generate_instance(n, n, otlp::CostModel::kUniform01, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(otlp::additive_approx_packing(inst, 0.05, mode));
  }
}

void Modes(benchmark::internal::Benchmark* b, std::initializer_list<std::int64_t> sizes) {
  for (std::int64_t mode : {0, 1}) {
    for (std::int64_t n : sizes) b->Args({mode, n});
  }
  b->ArgNames({"parallel", "n"});
}

}  // namespace

BENCHMARK(BM_Multiply)->Apply([](auto* b) { Modes(b, {1 << 10, 1 << 14}); });
BENCHMARK(BM_ExpShifted)->Apply([](auto* b) { Modes(b, {1 << 12, 1 << 18}); });
BENCHMARK(BM_Sum)->Apply([](auto* b) { Modes(b, {1 << 12, 1 << 18}); });
BENCHMARK(BM_MpcPipeline)->Apply([](auto* b) { Modes(b, {16, 32}); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PackingPipeline)
    ->Apply([](auto* b) { Modes(b, {16, 32}); })
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
