#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "singlab/banded.hpp"
#include "singlab/profile.hpp"
#include "singlab/strip.hpp"

using namespace singlab;

static void BM_ProfileValue(benchmark::State& state) {
    const ProfileParams params{NonlinearitySpec::pure_power(static_cast<double>(state.range(0))), 0.5};
    double t = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(profile_value(t, params));
        t = t < 50.0 ? t * 1.37 : 0.1;
    }
}
BENCHMARK(BM_ProfileValue)->Arg(2)->Arg(3)->Arg(5);

static void BM_BandedFactorize(benchmark::State& state) {
    const auto nx = static_cast<std::size_t>(state.range(0));
    const std::size_t n = nx * nx;
    for (auto _ : state) {
        state.PauseTiming();
        BandedMatrix A(n, nx, nx);
        for (std::size_t i = 0; i < n; ++i) {
            A.at(i, i) = 4.0;
            if (i >= 1) A.at(i, i - 1) = -1.0;
            if (i + 1 < n) A.at(i, i + 1) = -1.0;
            if (i >= nx) A.at(i, i - nx) = -1.0;
            if (i + nx < n) A.at(i, i + nx) = -1.0;
        }
        state.ResumeTiming();
        A.factorize();
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_BandedFactorize)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_NewtonSolve(benchmark::State& state) {
    StripDomain d;
    d.nx = 16;
    d.ny = static_cast<int>(state.range(0));
    d.q = 2.0;
    BoundaryData bc;
    bc.top = [](double x) { return 2.0 + 0.1 * std::sin(6.283185307179586 * x); };
    const auto spec = NonlinearitySpec::power_plus_polynomial(3.0, 1.0, {1.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(newton_solve(d, spec, bc, SolverConfig{}).residual_norm);
    }
}
BENCHMARK(BM_NewtonSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
