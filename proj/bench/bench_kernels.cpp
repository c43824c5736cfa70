// SPDX-License-Identifier: Apache-2.0
// Serial reference kernels against their OpenMP versions, plus one training
// step at the default model size.
//
//   OMP_NUM_THREADS=4 ./loadfc_bench --benchmark_counters_tabular=true
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "loadfc/kernels.hpp"
#include "loadfc/models.hpp"
#include "loadfc/optim.hpp"
#include "loadfc/train_eval.hpp"

using namespace loadfc;

namespace {

struct Operands {
  kernels::GemmDims d;
  std::vector<double> a, b, c;

  explicit Operands(std::size_t m, std::size_t k, std::size_t n)
      : d{m, k, n}, a(m * k), b(k * n), c(m * n) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& x : a) x = u(gen);
    for (double& x : b) x = u(gen);
  }
};

template <void (*Gemm)(kernels::GemmDims, std::span<const double>, std::span<const double>,
                       std::span<double>)>
void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  Operands op(m, n, 3 * n);
  for (auto _ : state) {
    Gemm(op.d, op.a, op.b, op.c);
    benchmark::DoNotOptimize(op.c.data());
  }
  state.counters["GFLOP/s"] = benchmark::Counter(
      2.0 * double(op.d.m * op.d.k * op.d.n), benchmark::Counter::kIsIterationInvariantRate,
      benchmark::Counter::kIs1000);
}

template <void (*Gemm)(kernels::GemmDims, std::span<const double>, std::span<const double>,
                       std::span<double>)>
void BM_GemmTn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  Operands op(m, n, 3 * n);
  std::vector<double> dc(m * 3 * n, 0.5), db(n * 3 * n);
  for (auto _ : state) {
    Gemm(op.d, op.a, dc, db);
    benchmark::DoNotOptimize(db.data());
  }
  state.counters["GFLOP/s"] = benchmark::Counter(
      2.0 * double(op.d.m * op.d.k * op.d.n), benchmark::Counter::kIsIterationInvariantRate,
      benchmark::Counter::kIs1000);
}

// hidden size x batch rows: a single GRU step (1 row) and a stacked
// weight-gradient update (one row per time step).
void gemm_args(benchmark::internal::Benchmark* b) {
  for (int hidden : {16, 64, 128})
    for (int rows : {1, 96, 672}) b->Args({hidden, rows});
}

BENCHMARK(BM_Gemm<kernels::serial::gemm>)->Name("gemm/serial")->Apply(gemm_args);
BENCHMARK(BM_Gemm<kernels::omp::gemm>)->Name("gemm/omp")->Apply(gemm_args);
BENCHMARK(BM_GemmTn<kernels::serial::gemm_acc_tn>)->Name("gemm_acc_tn/serial")->Apply(gemm_args);
BENCHMARK(BM_GemmTn<kernels::omp::gemm_acc_tn>)->Name("gemm_acc_tn/omp")->Apply(gemm_args);

void BM_TrainStep(benchmark::State& state) {
  ModelConfig c;
  c.kind = state.range(0) ? ModelKind::Seq2Seq : ModelKind::Model1;
  auto model = Model::create(c);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-1, 1);
  WindowInput in{Tensor(Shape{c.training_window, c.input_dim}),
                 Tensor(Shape{c.predict_window, c.input_dim - 1})};
  for (std::size_t i = 0; i < in.x.size(); ++i) in.x[i] = u(gen);
  for (std::size_t i = 0; i < in.y_features.size(); ++i) in.y_features[i] = u(gen);
  const auto params = model->parameters();
  TrainConfig cfg;
  Tape tape;
  for (auto _ : state) {
    tape.clear();
    const ForwardResult fr = model->forward(tape, in);
    const Var target = tape.constant(Tensor(fr.prediction.value().shape(), 0.5));
    tape.backward(training_loss(fr, target, cfg));
    sgd_step(params, 1e-6);
  }
  state.SetLabel(std::string(to_string(c.kind)));
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
