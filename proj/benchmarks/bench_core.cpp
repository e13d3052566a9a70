// Scaling of the main kernels with the node count N.

#include <benchmark/benchmark.h>

#include <cmath>

#include "poslab/geometry.hpp"
#include "poslab/groundstate.hpp"
#include "poslab/kato.hpp"
#include "poslab/liouville.hpp"
#include "poslab/operators.hpp"
#include "poslab/positivity.hpp"
#include "poslab/smoothing.hpp"

using namespace poslab;

namespace {

GridPtr euclid3(double r_max, std::size_t nodes) {
    return make_model(WarpingProfile::euclidean(), 3, {0.0, r_max, LeftEnd::pole, RightEnd::truncation}, nodes)
        .second;
}

GridFunction sinhc(const GridPtr& g, double shift) {
    return GridFunction::sample(g, [=](double r) { return (r == 0.0 ? 1.0 : std::sinh(r) / r) + shift; });
}

std::size_t nodes(const benchmark::State& s) { return static_cast<std::size_t>(s.range(0)); }

void BM_certificate(benchmark::State& state) {
    const auto g = euclid3(2.0, nodes(state));
    const auto l = schrodinger(g, 1.0);
    const auto u = sinhc(g, 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(check_subsolution(u, l));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_certificate)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

void BM_ground_state(benchmark::State& state) {
    const auto g = euclid3(2.0, nodes(state));
    const auto l = schrodinger(g, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet_ground(l, {0.0, 2.0}, 1.0));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ground_state)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

void BM_smoothing(benchmark::State& state) {
    const auto g = euclid3(3.0, nodes(state));
    const auto u = GridFunction::sample(g, [](double r) { return r <= 1.0 ? -1.0 : -1.0 / r; });
    const auto a = laplacian(g);
    for (auto _ : state) {
        const auto seq = monotone_smooth_approx(u, a, {0.5, 2.5}, 5);
        benchmark::DoNotOptimize(verify_approx_properties(seq));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_smoothing)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_brezis_kato(benchmark::State& state) {
    const auto g = euclid3(2.0, nodes(state));
    const auto u = sinhc(g, -1.1);
    const auto l = schrodinger(g, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(kato_via_appendix(u, l, {0.0, 2.0}));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_brezis_kato)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_liouville(benchmark::State& state) {
    const auto g = make_model(WarpingProfile::linear_cap(), 3, {0.0, 40.0, LeftEnd::pole, RightEnd::truncation},
                              nodes(state))
                       .second;
    const auto u = GridFunction::constant(g, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(liouville_verdict(u, 2.0, {2.5, 5.0, 10.0, 20.0}));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_liouville)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

void BM_catalog_punctured_ball(benchmark::State& state) {
    CatalogOptions opt;
    opt.nodes = nodes(state);
    opt.scan_nodes = nodes(state);
    for (auto _ : state) benchmark::DoNotOptimize(counterexample_catalog("punctured-ball", opt));
}
BENCHMARK(BM_catalog_punctured_ball)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
