// Serial reference against the OpenMP path for the two parallel kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "ellqg/rmatrix.hpp"
#include "ellqg/sweep.hpp"
#include "ellqg/tensor.hpp"

namespace {

using namespace ellqg;

const ModularParams& params() {
  static const ModularParams p(cplx(0.0, 0.9), 0.11);
  return p;
}

void sweep(benchmark::State& state, Execution exec) {
  const auto draws = draw_tuples(7, static_cast<std::size_t>(state.range(0)), 3, params());
  const TupleResidual dybe = [](const std::vector<cplx>& x) { return dybe_residual(x[0], x[1], x[2], params()); };
  for (auto _ : state) {
    SweepStats stats = run_sweep(draws, dybe, exec);
    benchmark::DoNotOptimize(stats.max_residual);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepSerial(benchmark::State& state) { sweep(state, Execution::serial); }
void BM_SweepParallel(benchmark::State& state) { sweep(state, Execution::parallel); }

Matrix random_columns(int n_sites, int cols) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(Eigen::Index{1} << n_sites, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = cplx(u(rng), u(rng));
  return m;
}

PairOperator pair_operator(int n_sites) {
  std::vector<int> spectators;
  for (int s = 0; s < n_sites; ++s)
    if (s != 1 && s != n_sites - 1) spectators.push_back(s);
  return PairOperator(n_sites, 1, n_sites - 1, [](cplx l) { return rmatrix_local(0.3, l, params()); },
                      cplx(0.2, 0.05), spectator_shift(spectators, params()));
}

void BM_PairApplySerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PairOperator op = pair_operator(n);
  const Matrix m = random_columns(n, 256);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_serial(m).data());
}

void BM_PairApplyParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PairOperator op = pair_operator(n);
  const Matrix m = random_columns(n, 256);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(m).data());
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(256)->Arg(2048)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(256)->Arg(2048)->UseRealTime();
BENCHMARK(BM_PairApplySerial)->Arg(6)->Arg(10)->UseRealTime();
BENCHMARK(BM_PairApplyParallel)->Arg(6)->Arg(10)->UseRealTime();

BENCHMARK_MAIN();
