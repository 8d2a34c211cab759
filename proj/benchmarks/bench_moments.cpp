#include <benchmark/benchmark.h>

#include <sstream>
#include <vector>

#include "skplane/ingest.hpp"
#include "skplane/moments.hpp"
#include "skplane/synth.hpp"

using namespace skplane;

static void BM_WindowMoments(benchmark::State& state) {
    synth::Rng rng(1);
    std::vector<std::vector<double>> windows(1024);
    for (auto& w : windows) {
        w.resize(static_cast<std::size_t>(state.range(0)));
        for (auto& v : w) v = 0.04 * rng.student_t(3.0);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(moments::window_moments(windows[i++ & 1023]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WindowMoments)->Arg(5)->Arg(7)->Arg(64);

static void BM_MomentOracle(benchmark::State& state) {
    synth::Rng rng(1);
    std::vector<double> w(7);
    for (auto& v : w) v = 0.04 * rng.student_t(3.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(synth::moment_oracle(w));
    }
}
BENCHMARK(BM_MomentOracle);

static void BM_IngestToMoments(benchmark::State& state) {
    synth::SynthConfig cfg;
    const std::string csv = synth::generate_raw_csv(cfg);
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        std::istringstream in(csv);
        const auto obs = ingest::parse_observations(in);
        const auto series = ingest::compute_all_returns(obs, ingest::ReturnMethod::Simple, threads);
        const auto raw = ingest::assemble_panel(series);
        benchmark::DoNotOptimize(moments::weekly_moments(raw, moments::default_covid_cutoff(), threads));
    }
}
BENCHMARK(BM_IngestToMoments)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
