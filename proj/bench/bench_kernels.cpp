// Serial reference loops against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "cpimpute/evaluation.hpp"
#include "cpimpute/gap_synthesis.hpp"
#include "cpimpute/kernels.hpp"
#include "support/synthetic.hpp"

using namespace cpimpute;

namespace {

struct Workload {
    std::vector<DayRecord> targets;
    std::vector<DayRecord> candidates;
    SeasonContext ctx;
};

/// Days of several years of synthetic data at 30 % missingness, so that
/// the target and candidate sets are large enough to split across threads.
const Workload& workload() {
    static const Workload w = [] {
        testing::SyntheticSpec spec;
        spec.days = 4 * 365;
        const EnergySeries es = testing::synthetic_energy(spec);
        const auto degraded = insert_missing(es, {0.3, 288, 0.05, 1});
        const CpiPlan plan = prepare_cpi(degraded.series);
        return Workload{plan.targets, plan.candidates, plan.context};
    }();
    return w;
}

const std::vector<NamedSeries>& suite() {
    static const std::vector<NamedSeries> s = [] {
        std::vector<NamedSeries> out;
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            testing::SyntheticSpec spec;
            spec.seed = seed;
            out.push_back({"s" + std::to_string(seed), testing::synthetic_energy(spec)});
        }
        return out;
    }();
    return s;
}

void BM_match_days_serial(benchmark::State& state) {
    const Workload& w = workload();
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::match_days_serial(w.targets, w.candidates, {}, w.ctx));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(w.targets.size() * w.candidates.size()));
}

void BM_match_days_parallel(benchmark::State& state) {
    const Workload& w = workload();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::match_days_parallel(w.targets, w.candidates, {}, w.ctx, threads));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(w.targets.size() * w.candidates.size()));
}

void BM_dissimilarity_matrix_serial(benchmark::State& state) {
    const Workload& w = workload();
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::dissimilarity_matrix_serial(w.targets, w.candidates, {}, w.ctx));
    }
}

void BM_dissimilarity_matrix_parallel(benchmark::State& state) {
    const Workload& w = workload();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::dissimilarity_matrix_parallel(w.targets, w.candidates, {}, w.ctx, threads));
    }
}

void BM_evaluate(benchmark::State& state) {
    EvaluationConfig cfg;
    cfg.shares = {0.1, 0.3};
    cfg.execution = state.range(0) == 0 ? ExecutionPolicy::serial() : ExecutionPolicy{true, int(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(suite(), cfg));
}

}  // namespace

BENCHMARK(BM_match_days_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_match_days_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dissimilarity_matrix_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dissimilarity_matrix_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
// Arg 0 runs the serial reference; other values are thread counts.
BENCHMARK(BM_evaluate)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
