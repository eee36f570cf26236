#include <benchmark/benchmark.h>

#include "qdcca/dataset_io.hpp"
#include "qdcca/dcca.hpp"
#include "qdcca/eigensolver.hpp"
#include "qdcca/mean_estimation.hpp"
#include "qdcca/state_preparation.hpp"

using namespace qdcca;

namespace {

PairedDataset dataset(std::size_t p, std::size_t per_class) {
    GeneratorSpec spec;
    spec.p = p;
    spec.q = p;
    spec.class_sizes = {per_class, per_class};
    spec.seed = 17;
    return generate_dataset(spec);
}

void BM_AmplitudeEstimate(benchmark::State &state) {
    Matrix m(1, 8);
    m << 0.25, -0.5, 1.0, 0.75, -1.0, 0.5, 0.125, -0.25;
    const OracleTable table("L", m, FixedPointFormat{4, 7});
    const auto uy = build_uy(table, 0, 1.0);
    const auto bits = static_cast<unsigned>(state.range(0));
    Rng rng(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(amplitude_estimate(uy.problem, bits, rng));
    }
}
BENCHMARK(BM_AmplitudeEstimate)->Arg(6)->Arg(8)->Arg(10);

void BM_ClassicalDcca(benchmark::State &state) {
    const auto data = dataset(static_cast<std::size_t>(state.range(0)), 16);
    for (auto _ : state) {
        const auto ops = build_operators(mean_center(data), data);
        benchmark::DoNotOptimize(solve_dcca(ops, data.classes()));
    }
}
BENCHMARK(BM_ClassicalDcca)->Arg(2)->Arg(8)->Arg(32);

void BM_PreparePsiE(benchmark::State &state) {
    const auto data = dataset(static_cast<std::size_t>(state.range(0)), 4);
    const auto ops = build_operators(mean_center(data), data);
    const auto bounds = ScalingBounds::from(data, ops);
    StatePrepConfig config;
    config.seed = 5;
    config.injected_row_means = mean_center(data).row_means;
    const auto means = estimate_means(data, config);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prepare_psi_e(data, bounds, means, config));
    }
}
BENCHMARK(BM_PreparePsiE)->Arg(1)->Arg(2)->Arg(4);

void BM_PipelineSmall(benchmark::State &state) {
    const auto data = dataset(1, 2);
    PipelineConfig config;
    config.seed = 1;
    config.prep.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_qpe_pipeline(data, config));
    }
}
BENCHMARK(BM_PipelineSmall)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
