#include <benchmark/benchmark.h>

#include <memory>

#include "qfock/fock.hpp"
#include "qfock/moments.hpp"
#include "qfock/transform.hpp"

using namespace qfock;

static void BM_CdfBuild(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) {
    CdfModel F{DensityModel(QContext(q))};
    benchmark::DoNotOptimize(F.cdf(0.3));
  }
}
BENCHMARK(BM_CdfBuild)->Arg(10)->Arg(50)->Arg(90)->Unit(benchmark::kMillisecond);

// first column only, at the default series cutoff for each q
static void BM_WColumn(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0)) / 100.0;
  const QContext ctx(q);
  const GammaMap g(std::make_shared<const CdfModel>(DensityModel(ctx)));
  WOptions opt;
  opt.columns = 1;
  for (auto _ : state) {
    const WCoefficients w = w_matrix(g, ctx.series_cutoff(), opt);
    benchmark::DoNotOptimize(w.ortho(1, 1));
  }
  state.counters["K"] = ctx.series_cutoff();
}
BENCHMARK(BM_WColumn)->Arg(50)->Arg(90)->Unit(benchmark::kMillisecond);

static void BM_GramLevel(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const FockSpace space(2, level, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(space, level).sum());
  state.counters["dim"] = static_cast<double>(1 << level);
}
BENCHMARK(BM_GramLevel)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

static void BM_TheoremCheck(benchmark::State& state) {
  TheoremOptions opt;
  opt.operator_level = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const MomentReport r = theorem_check(QContext(0.5), opt);
    benchmark::DoNotOptimize(r.margin);
  }
}
BENCHMARK(BM_TheoremCheck)->Arg(0)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
