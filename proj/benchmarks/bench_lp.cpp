#include <benchmark/benchmark.h>

#include "centerfield/manifold.hpp"
#include "centerfield/pipeline.hpp"

using namespace centerfield;

namespace {

const Analysis& det2d_analysis() {
    static Analysis analysis = [] {
        RunConfig config;
        config.system_name = "det-2d";
        config.met_steps = 500;
        return analyze(config);
    }();
    return analysis;
}

} // namespace

static void BM_OperatorApply(benchmark::State& state) {
    const Analysis& analysis = det2d_analysis();
    LyapunovPerron op(analysis.model, 0);
    Eigen::VectorXd v = analysis.model.splitting.center_at(0).col(0) * 0.01;
    SequenceWindow gamma = op.solve(v).window;
    for (auto _ : state) {
        SequenceWindow image = op.apply(v, gamma);
        benchmark::DoNotOptimize(image.entries.data());
    }
}
BENCHMARK(BM_OperatorApply);

static void BM_FixedPointSolve(benchmark::State& state) {
    const Analysis& analysis = det2d_analysis();
    LyapunovPerron op(analysis.model, 0);
    Eigen::VectorXd v = analysis.model.splitting.center_at(0).col(0) * 0.01;
    for (auto _ : state) {
        FixedPointResult fp = op.solve(v);
        benchmark::DoNotOptimize(fp.residual);
    }
}
BENCHMARK(BM_FixedPointSolve);

static void BM_ChartGrid(benchmark::State& state) {
    const Analysis& analysis = det2d_analysis();
    GridSpec grid{0.02, static_cast<int>(state.range(0))};
    for (auto _ : state) {
        CenterChart chart = sample_manifold(analysis.model, 0, grid);
        benchmark::DoNotOptimize(chart.points.data());
    }
}
BENCHMARK(BM_ChartGrid)->Arg(5)->Arg(21)->Unit(benchmark::kMillisecond);
