#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bnprd/local_inference.hpp"
#include "bnprd/partition_model.hpp"
#include "bnprd/sampler.hpp"
#include "bnprd/special_fn.hpp"
#include "bnprd/synthgen.hpp"

namespace {

using namespace bnprd;

void BM_MhStep(benchmark::State& state) {
    const auto data = generate(sharp_recovery_config(1)).data;
    const Hyperparameters hyper;
    PosteriorKernel kernel(data, hyper);
    Rng rng(7);
    ChainState chain{OrderedPartition::equal_blocks(static_cast<int>(data.size()), 10), 0.0, {}};
    chain.log_kernel = kernel(chain.partition);
    const bool shift = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(mh_step(chain, kernel, rng, shift));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MhStep)->Arg(0)->Arg(1);

void BM_BlockLogMarginal(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    std::vector<double> x(m), r(m);
    for (std::size_t i = 0; i < m; ++i) {
        r[i] = nd(gen);
        x[i] = 0.5 * r[i] + nd(gen);
    }
    const BlockMarginal marginal{Hyperparameters{}};
    for (auto _ : state) benchmark::DoNotOptimize(marginal(x, r));
}
BENCHMARK(BM_BlockLogMarginal)->Arg(1)->Arg(10)->Arg(100);

void BM_CompareGroups(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    std::vector<double> a(m), b(m);
    for (auto& v : a) v = nd(gen) + 1.0;
    for (auto& v : b) v = nd(gen);
    const std::vector<std::uint8_t> ta(m, 1), tb(m, 0);
    for (auto _ : state) benchmark::DoNotOptimize(compare_groups(a, b, ta, tb));
}
BENCHMARK(BM_CompareGroups)->Arg(8)->Arg(40)->Arg(200);

void BM_RegIncBeta(benchmark::State& state) {
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reg_inc_beta(7.5, 12.0, x));
        x = x > 0.98 ? 0.01 : x + 0.013;
    }
}
BENCHMARK(BM_RegIncBeta);

}  // namespace
BENCHMARK_MAIN();
