#include <benchmark/benchmark.h>

#include "centerfield/met.hpp"
#include "centerfield/systems.hpp"

using namespace centerfield;

static void BM_SpectrumRandomDiag(benchmark::State& state) {
    BenchmarkSystem sys = build_benchmark("random-diag");
    Realization omega(sys.driver);
    const auto n = state.range(0);
    for (auto _ : state) {
        LyapunovSpectrum spectrum =
            lyapunov_spectrum(sys.bundle.linear, sys.bundle.field, omega, 3, n);
        benchmark::DoNotOptimize(spectrum.exponents.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SpectrumRandomDiag)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SplitDet3d(benchmark::State& state) {
    BenchmarkSystem sys = build_benchmark("det-3d");
    Realization omega(sys.driver);
    LyapunovSpectrum spectrum = lyapunov_spectrum(sys.bundle.linear, sys.bundle.field, omega, 3, 500);
    for (auto _ : state) {
        OseledetsSplitting split =
            oseledets_split(sys.bundle.linear, sys.bundle.field, omega, spectrum, state.range(0));
        benchmark::DoNotOptimize(split.center.data());
    }
}
BENCHMARK(BM_SplitDet3d)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
