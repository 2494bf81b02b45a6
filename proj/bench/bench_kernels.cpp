// Serial reference against OpenMP kernels.
#include "bss/ctmc.hpp"
#include "bss/desim.hpp"
#include "bss/productform.hpp"
#include "bss/routing.hpp"

#include <benchmark/benchmark.h>

namespace {

bss::NetworkParams instance(int n, int c, int k) {
    std::vector<double> lambda;
    for (int i = 0; i < n; ++i) lambda.push_back(1.0 + 0.5 * i);
    return bss::uniform_params(n, c, k, lambda);
}

// (N, C, K) -> 680, ~4e4 and ~8e5 states.
void sizes(benchmark::internal::Benchmark* b) {
    b->Args({3, 1, 4})->Args({3, 2, 5})->Args({3, 3, 8})->Unit(benchmark::kMillisecond);
}

template <bool Parallel>
void BM_generator(benchmark::State& st) {
    const auto p = instance(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), static_cast<int>(st.range(2)));
    const auto space = bss::enumerate(p);
    for (auto _ : st) {
        auto g = Parallel ? bss::build_generator(space, p) : bss::reference::build_generator(space, p);
        benchmark::DoNotOptimize(g.exit_rate.data());
    }
    st.counters["states"] = static_cast<double>(space.size());
}

template <bool Parallel>
void BM_normalize(benchmark::State& st) {
    const auto p = instance(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), static_cast<int>(st.range(2)));
    const auto space = bss::enumerate(p);
    const auto v = bss::solve_node_level(p, std::vector<double>(static_cast<std::size_t>(p.N), 0.1));
    for (auto _ : st) {
        auto n = Parallel ? bss::normalize_direct(space, v, p, bss::Convention::standard)
                          : bss::reference::normalize_direct(space, v, p, bss::Convention::standard);
        benchmark::DoNotOptimize(n.G);
    }
    st.counters["states"] = static_cast<double>(space.size());
}

template <bool Parallel>
void BM_simulate(benchmark::State& st) {
    const auto p = instance(2, 2, 2);
    bss::SimConfig cfg;
    cfg.horizon = 1e4;
    cfg.warmup = 1e2;
    cfg.replications = static_cast<int>(st.range(0));
    for (auto _ : st) {
        auto e = Parallel ? bss::simulate(p, cfg) : bss::reference::simulate(p, cfg);
        benchmark::DoNotOptimize(e.events);
    }
}

}  // namespace

BENCHMARK(BM_generator<false>)->Name("generator/serial")->Apply(sizes);
BENCHMARK(BM_generator<true>)->Name("generator/parallel")->Apply(sizes);
BENCHMARK(BM_normalize<false>)->Name("normalize_direct/serial")->Apply(sizes);
BENCHMARK(BM_normalize<true>)->Name("normalize_direct/parallel")->Apply(sizes);
BENCHMARK(BM_simulate<false>)->Name("simulate/serial")->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate<true>)->Name("simulate/parallel")->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
