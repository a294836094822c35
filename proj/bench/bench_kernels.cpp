// Serial reference vs OpenMP kernels.
//   bench_kernels --benchmark_filter=Mul

#include <benchmark/benchmark.h>

#include <random>

#include "sigtree/cc_norm.hpp"
#include "sigtree/inverse_system.hpp"
#include "sigtree/kernels.hpp"
#include "sigtree/limit_space.hpp"
#include "sigtree/signature.hpp"

using namespace sigtree;

namespace {

TruncatedTensor random_group_like(int dim, int step, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.3);
    TruncatedTensor t(dim, step);
    for (int k = 1; k <= step; ++k)
        for (double& c : t.level(k)) c = g(rng);
    return t;
}

PLPath random_path(int dim, int segments, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Point> v(static_cast<std::size_t>(segments) + 1, Point(static_cast<std::size_t>(dim), 0.0));
    for (std::size_t i = 1; i < v.size(); ++i)
        for (std::size_t j = 0; j < v[i].size(); ++j) v[i][j] = v[i - 1][j] + g(rng);
    return PLPath::from_vertices(v);
}

template <bool Parallel>
void BM_Mul(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0)), step = static_cast<int>(state.range(1));
    const auto a = random_group_like(dim, step, 1), b = random_group_like(dim, step, 2);
    TruncatedTensor out(dim, step);
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::truncated_mul(a, b, out);
        else
            kernels::serial::truncated_mul(a, b, out);
        benchmark::DoNotOptimize(out.level(step).data());
    }
    state.counters["threads"] = Parallel ? kernels::max_threads() : 1;
}
BENCHMARK(BM_Mul<false>)->Name("Mul/serial")->Args({2, 12})->Args({3, 8})->Args({4, 7})->Args({8, 5})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Mul<true>)->Name("Mul/parallel")->Args({2, 12})->Args({3, 8})->Args({4, 7})->Args({8, 5})
    ->Unit(benchmark::kMillisecond);

// Signature tensor of a 20-segment path; the top level crosses the parallel
// threshold. Arg 0 = one thread, 1 = all threads.
void BM_Signature(benchmark::State& state) {
    const int full = kernels::max_threads();
    const int threads = state.range(0) != 0 ? full : 1;
    const int dim = static_cast<int>(state.range(1)), step = static_cast<int>(state.range(2));
    kernels::set_threads(threads);
    const auto p = random_path(dim, 20, 3);
    for (auto _ : state) benchmark::DoNotOptimize(signature_tensor(p, step).level(step).data());
    kernels::set_threads(full);
    state.counters["threads"] = threads;
}
BENCHMARK(BM_Signature)->Name("Signature")->Args({0, 3, 9})->Args({1, 3, 9})->Args({0, 4, 7})->Args({1, 4, 7})
    ->Unit(benchmark::kMillisecond);

void BM_CCNorm(benchmark::State& state) {
    CCNormOptions opts;
    opts.parallel = state.range(0) != 0;
    const auto g = signature(PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0.5, 2}}), 3);
    for (auto _ : state) benchmark::DoNotOptimize(cc_norm(g, opts).upper);
    state.counters["threads"] = opts.parallel ? kernels::max_threads() : 1;
}
BENCHMARK(BM_CCNorm)->Name("CCNorm/multistart")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_TreeAxioms(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(tree_axioms_experiment(2, 2000, 2000, 5, 7, parallel).max_four_point_excess);
}
BENCHMARK(BM_TreeAxioms)->Name("TreeAxioms/2000")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
