#include <benchmark/benchmark.h>

#include "plurilab/analysis.hpp"
#include "plurilab/fixtures.hpp"
#include "plurilab/lelong.hpp"
#include "plurilab/reference_forms.hpp"

using namespace plurilab;
using forms::Complex;
using forms::Point;

namespace {
quadrature::Options bench_opts(std::int64_t budget) {
    quadrature::Options opt;
    opt.seed = 7;
    opt.budget = budget;
    return opt;
}
} // namespace

static void BM_BallMassBeta2(benchmark::State& state) {
    forms::Form b2 = forms::beta_power(2, 2);
    quadrature::Density d;
    d.dim = 2;
    d.eval = [b2](std::span<const Complex> z) { return b2.top_density(z); };
    auto opt = bench_opts(state.range(0));
    Point c(2, Complex(0.0));
    for (auto _ : state) {
        auto r = quadrature::integrate(d, quadrature::Ball{c, 1.0}, opt);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_BallMassBeta2)->Arg(100000)->Arg(1000000);

static void BM_SingularTraceProfile(benchmark::State& state) {
    auto T0 = currents::make_fixture("T0");
    Point z0(2, Complex(0.0));
    std::vector<double> grid{0.25, 0.5, 1.0};
    auto opt = bench_opts(state.range(0));
    for (auto _ : state) {
        auto prof = lelong::nu_profile(T0, z0, grid, opt);
        benchmark::DoNotOptimize(prof.values);
    }
}
BENCHMARK(BM_SingularTraceProfile)->Arg(100000)->Arg(1000000);

static void BM_CarrierNuProfile(benchmark::State& state) {
    auto T1 = currents::make_fixture("T1");
    Point z0(2, Complex(0.0));
    std::vector<double> grid{0.1, 0.3, 1.0};
    auto opt = bench_opts(1'000'000);
    for (auto _ : state) {
        auto prof = lelong::nu_profile(T1, z0, grid, opt);
        benchmark::DoNotOptimize(prof.values);
    }
}
BENCHMARK(BM_CarrierNuProfile);

static void BM_JensenResidual(benchmark::State& state) {
    auto S = currents::make_fixture("S_rad");
    Point z0(2, Complex(0.0));
    auto opt = bench_opts(state.range(0));
    for (auto _ : state) {
        auto rep = analysis::jensen_check(S, z0, 1.0, 2.0, 2.0, opt);
        benchmark::DoNotOptimize(rep.residual);
    }
}
BENCHMARK(BM_JensenResidual)->Arg(100000)->Arg(1000000);

static void BM_ConePairing(benchmark::State& state) {
    auto T2 = currents::make_fixture("T2");
    auto bank = currents::test_form_bank(2, 1, 0.25, 1.0, 1, 99);
    auto opt = bench_opts(1'000'000);
    Complex a(0.125, 0.0);
    for (auto _ : state) {
        auto Ta = currents::dilate_pullback(T2, a);
        auto p = currents::pair(Ta, bank[0], opt);
        benchmark::DoNotOptimize(p.value);
    }
}
BENCHMARK(BM_ConePairing);

BENCHMARK_MAIN();
