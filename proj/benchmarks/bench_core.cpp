#include <benchmark/benchmark.h>

#include "growthlab/experiments.hpp"
#include "growthlab/model.hpp"
#include "growthlab/oracles.hpp"
#include "growthlab/progressions.hpp"

namespace {

using namespace growthlab;

void BM_TransitionProbabilities(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<double> lambdas(n);
    RngStream rng(1, 0);
    for (double& v : lambdas) v = 0.2 + 2.0 * rng.next_double();
    const Params params = make_params(lambdas);
    Config config = zero_config(n);
    for (auto& c : config.counts) c = rng.next_u64() % 100;
    for (auto _ : state) {
        benchmark::DoNotOptimize(transition_probabilities(params, config));
    }
}
BENCHMARK(BM_TransitionProbabilities)->Arg(4)->Arg(16)->Arg(64);

void BM_SimulateSteps(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<double> lambdas(n);
    RngStream seed_rng(2, 0);
    for (double& v : lambdas) v = 0.2 + 2.0 * seed_rng.next_double();
    const Params params = make_params(lambdas);
    std::uint64_t stream = 0;
    for (auto _ : state) {
        RngStream rng(42, stream++);
        benchmark::DoNotOptimize(simulate(params, zero_config(n), 10'000, rng));
    }
    state.SetItemsProcessed(state.iterations() * 10'000);
}
BENCHMARK(BM_SimulateSteps)->Arg(4)->Arg(16);

void BM_WProduct(benchmark::State& state) {
    const Params params = make_params({0.5, 1.0, 1.0, 2.0, 0.7});
    const Config x0 = make_config({1, 0, 0, 0, 0}, params);
    const PairRates pr = pair_rates(params, x0, 1);
    std::uint64_t stream = 0;
    for (auto _ : state) {
        RngStream rng(7, stream++);
        benchmark::DoNotOptimize(w_product_log(pr, 200, rng, true));
    }
    state.SetItemsProcessed(state.iterations() * 201);
}
BENCHMARK(BM_WProduct);

void BM_SampleZ(benchmark::State& state) {
    const ZetaSpec spec = ZetaSpec::zeta2(2.0, 1.0, 0.1);
    std::uint64_t stream = 0;
    for (auto _ : state) {
        RngStream rng(11, stream++);
        benchmark::DoNotOptimize(sample_Z(spec, 1e-9, 1'000'000, rng));
    }
}
BENCHMARK(BM_SampleZ);

void BM_SingleSiteStick(benchmark::State& state) {
    const Params params = make_params({1.0, 3.0, 1.0, 1.0});
    const Config x0 = zero_config(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(single_site_stick_probability(params, x0, 1, 1e-10));
    }
}
BENCHMARK(BM_SingleSiteStick);

} // namespace

BENCHMARK_MAIN();
