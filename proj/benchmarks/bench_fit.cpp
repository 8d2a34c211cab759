#include <benchmark/benchmark.h>

#include "skplane/econometrics.hpp"
#include "skplane/synth.hpp"

using namespace skplane;

namespace {

econ::DesignMatrix panel_design(econ::Model model) {
    synth::SynthConfig cfg;
    cfg.dgp = synth::Dgp::QuadraticSK;
    return econ::build_design(synth::generate_moment_panel(cfg).panel, {model});
}

}  // namespace

static void BM_PooledOLS(benchmark::State& state) {
    const auto d = panel_design(static_cast<econ::Model>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(econ::fit_pooled_ols(d));
}
BENCHMARK(BM_PooledOLS)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

static void BM_RandomEffects(benchmark::State& state) {
    const auto d = panel_design(static_cast<econ::Model>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(econ::fit_random_effects(d));
}
BENCHMARK(BM_RandomEffects)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

static void BM_OlsOracle(benchmark::State& state) {
    const auto d = panel_design(econ::Model::M11);
    for (auto _ : state) benchmark::DoNotOptimize(synth::ols_oracle(d));
}
BENCHMARK(BM_OlsOracle)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
