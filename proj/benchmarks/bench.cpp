#include <benchmark/benchmark.h>

#include "yamabe/bubble.hpp"
#include "yamabe/curvature.hpp"
#include "yamabe/harmonics.hpp"
#include "yamabe/pohozaev.hpp"
#include "yamabe/sphere_moments.hpp"
#include "yamabe/sturm_liouville.hpp"

using namespace yamabe;

static void BM_eval_bubble(benchmark::State& state) {
    Dimension dim(10);
    double r = 0.0;
    for (auto _ : state) {
        r += 1e-4;
        benchmark::DoNotOptimize(eval_bubble(dim, r));
    }
}
BENCHMARK(BM_eval_bubble);

static void BM_V_lambda(benchmark::State& state) {
    Dimension dim(10);
    KelvinParams kp(1.05);
    for (auto _ : state) benchmark::DoNotOptimize(eval_V_lambda(dim, kp, 2.0));
}
BENCHMARK(BM_V_lambda);

static void BM_sphere_moment(benchmark::State& state) {
    MultiIndex a(10, 0);
    a[0] = 4;
    a[1] = 2;
    a[2] = 2;
    for (auto _ : state) benchmark::DoNotOptimize(sphere_monomial_average(10, a));
}
BENCHMARK(BM_sphere_moment);

static void BM_solve_f2(benchmark::State& state) {
    Dimension dim(10);
    SolveOptions so;
    so.points_per_decade = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_f2(dim, so));
}
BENCHMARK(BM_solve_f2)->Arg(256)->Arg(1024);

static void BM_project_hypothesis(benchmark::State& state) {
    auto raw = random_jet(10, 1, JetClass::hypothesis); // warms the cached system
    std::uint64_t seed = 2;
    for (auto _ : state) benchmark::DoNotOptimize(random_jet(10, seed++, JetClass::hypothesis));
}
BENCHMARK(BM_project_hypothesis)->Unit(benchmark::kMillisecond);

static void BM_rbar6(benchmark::State& state) {
    auto jet = random_jet(10, 3, JetClass::hypothesis);
    for (auto _ : state) benchmark::DoNotOptimize(rbar6_formula(jet));
}
BENCHMARK(BM_rbar6)->Unit(benchmark::kMillisecond);

static void BM_pohozaev_flat(benchmark::State& state) {
    Dimension dim(10);
    for (auto _ : state) {
        PohozaevInput in{dim, nullptr, 1.0, 5.0, bubble_field(dim), 1 << 12};
        benchmark::DoNotOptimize(eval_pohozaev(in));
    }
}
BENCHMARK(BM_pohozaev_flat)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
