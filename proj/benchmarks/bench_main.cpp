#include <benchmark/benchmark.h>

#include "batchbo/acquisition.hpp"
#include "batchbo/benchmarks.hpp"
#include "batchbo/gp.hpp"
#include "batchbo/kmeans.hpp"
#include "batchbo/slice_sampler.hpp"
#include "batchbo/strategies.hpp"

using namespace batchbo;

namespace {

Dataset branin_data(std::size_t n, std::uint64_t seed) {
  const Objective f = make_objective({"branin", {}});
  Rng rng = make_rng(seed, 0);
  Dataset data(f.direction());
  const Matrix X = f.domain().sample_uniform(n, rng);
  for (Eigen::Index i = 0; i < X.rows(); ++i) data.append(X.row(i).transpose(), f.eval(X.row(i).transpose()));
  return data;
}

void BM_FitGp(benchmark::State& state) {
  const Objective f = make_objective({"branin", {}});
  const Dataset data = branin_data(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_gp(data, f.domain(), {}, 7));
}
BENCHMARK(BM_FitGp)->Arg(10)->Arg(50)->Arg(90)->Unit(benchmark::kMillisecond);

void BM_ExpectedImprovement(benchmark::State& state) {
  const Objective f = make_objective({"branin", {}});
  const GpPosterior gp = fit_gp(branin_data(50, 1), f.domain(), {}, 7);
  const auto ctx = AcquisitionContext::from_posterior(gp);
  Rng rng = make_rng(3, 0);
  const Matrix pts = f.domain().sample_uniform(1000, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ei_surface(ctx, pts));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ExpectedImprovement);

void BM_Bgss(benchmark::State& state) {
  const Objective f = make_objective({"branin", {}});
  const GpPosterior gp = fit_gp(branin_data(30, 1), f.domain(), {}, 7);
  const auto ctx = AcquisitionContext::from_posterior(gp);
  const AcquisitionSurface acq = [&ctx](const Vector& x) { return expected_improvement(ctx, x); };
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bgss_sample_or_uniform(acq, f.domain(), 200, 0.0, ++seed));
  }
}
BENCHMARK(BM_Bgss)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  Rng rng = make_rng(5, 0);
  const Matrix pts = Domain::box({{0, 1}, {0, 1}}).sample_uniform(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_fit(pts, 8, 11));
}
BENCHMARK(BM_KMeans)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_KmbboEpoch(benchmark::State& state) {
  const Objective f = make_objective({"branin", {}});
  const Dataset data = branin_data(static_cast<std::size_t>(state.range(0)), 1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const GpPosterior gp = fit_gp(data, f.domain(), {}, ++seed);
    benchmark::DoNotOptimize(kmbbo_batch(gp, data, f.domain(), 8, 200, seed));
  }
}
BENCHMARK(BM_KmbboEpoch)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
