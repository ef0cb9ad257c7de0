#include <benchmark/benchmark.h>

#include "streamopt/datagen.hpp"
#include "streamopt/linalg.hpp"
#include "streamopt/optimizers.hpp"

using namespace streamopt;

namespace {

SymMatrix random_spd(int d, RngStream& rng) {
  SymMatrix m = SymMatrix::identity(d);
  Vector v(d);
  for (int k = 0; k < 2 * d; ++k) {
    for (double& x : v) x = rng.gaussian();
    m.add_outer(v, 1.0 / d);
  }
  return m;
}

void BM_RankOneInverseUpdate(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RngStream rng(1);
  SymMatrix inv = dense_inverse(random_spd(d, rng));
  Vector v(d), work(d);
  for (auto _ : state) {
    state.PauseTiming();
    for (double& x : v) x = rng.gaussian();
    state.ResumeTiming();
    rank_one_inverse_update(inv, v, 1e-3, work);
    benchmark::DoNotOptimize(inv);
  }
  state.SetComplexityN(d);
}
BENCHMARK(BM_RankOneInverseUpdate)->Arg(10)->Arg(50)->Arg(100)->Arg(200)->Complexity();

void BM_DenseInverse(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RngStream rng(2);
  const SymMatrix m = random_spd(d, rng);
  for (auto _ : state) {
    SymMatrix inv = dense_inverse(m);
    benchmark::DoNotOptimize(inv);
  }
  state.SetComplexityN(d);
}
BENCHMARK(BM_DenseInverse)->Arg(10)->Arg(50)->Arg(100)->Arg(200)->Complexity();

// Per-sample cost of the curvature-scaled streaming step, full inclusion
// versus inclusion probability 1/d.
void BM_CurvatureStep(benchmark::State& state) {
  const int d = 100;
  const bool subsample = state.range(0) != 0;
  RngStream model_rng(3);
  const CovarianceModel model(d, model_rng);
  GroundTruth truth{ProblemKind::kLeastSquares, ls_theta_star(d), 1.0};

  OptimizerConfig cfg;
  cfg.method = Method::kSsn;
  cfg.problem = ProblemKind::kLeastSquares;
  cfg.dim = d;
  cfg.step = StepSchedule::sample_proportion();
  cfg.batch = BatchSchedule::constant(d);
  cfg.curvature.p = subsample ? 1.0 / d : 1.0;
  cfg.curvature.iota = 0.25;
  cfg.curvature.w_prime = 2.0;
  Optimizer opt(cfg, Vector(d, 0.0));

  RngStream data_rng(4), z_rng(5);
  std::vector<Sample> batch;
  long samples = 0;
  for (auto _ : state) {
    state.PauseTiming();
    draw_batch(model, truth, d, data_rng, batch);
    state.ResumeTiming();
    opt.step(batch, z_rng);
    samples += d;
  }
  state.SetItemsProcessed(samples);
}
BENCHMARK(BM_CurvatureStep)->Arg(0)->Arg(1)->ArgNames({"subsample"});

}  // namespace

BENCHMARK_MAIN();
