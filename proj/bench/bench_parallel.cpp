// OpenMP kernels against their serial references.

#include "mapruin/kernel_tabulate.hpp"
#include "mapruin/model_io.hpp"
#include "mapruin/renewal.hpp"
#include "mapruin/simulator.hpp"
#include "support/random_model.hpp"

#include <benchmark/benchmark.h>

using namespace mapruin;

namespace {

const KernelContext& context() {
    static const KernelContext ctx(validate(testing::random_model(1)));
    return ctx;
}

void BM_TabulateKernel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(tabulate_kernel(context(), 0.01, static_cast<int>(st.range(0))));
}
void BM_TabulateKernelSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(tabulate_kernel_serial(context(), 0.01, static_cast<int>(st.range(0))));
}

void BM_SolveHitting(benchmark::State& st) {
    HittingOptions o;
    o.parallel = st.range(0) != 0;
    for (auto _ : st) benchmark::DoNotOptimize(solve_hitting(context(), 10.0, 0.01, o));
}

void BM_EstimateHitting(benchmark::State& st) {
    const MapModel m = validate(builtin_model("mixed3"));
    RunOptions o;
    o.reps = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(estimate_hitting(m, {1.0, 2.0, 5.0}, 0, o));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
void BM_EstimateHittingSerial(benchmark::State& st) {
    const MapModel m = validate(builtin_model("mixed3"));
    RunOptions o;
    o.reps = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(estimate_hitting_serial(m, {1.0, 2.0, 5.0}, 0, o));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_TabulateKernel)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TabulateKernelSerial)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveHitting)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateHitting)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateHittingSerial)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
