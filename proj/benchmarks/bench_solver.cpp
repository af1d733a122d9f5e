#include "acs/background.hpp"
#include "acs/diagnostics.hpp"
#include "acs/ma_solver.hpp"
#include "acs/reduction.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace acs;

namespace {

const ConeSpec kCao = ConeSpec::euclidean(2, 0.5, 1.0);

struct Fixture {
    RadialGrid grid;
    BackgroundMetric bg;
    Derivs D;
    std::vector<double> phi;
    explicit Fixture(int N) : grid(-6.0, 30.0, N), bg(build_background(kCao, grid)), D(grid), phi(N) {
        for (int j = 0; j < N; ++j) phi[j] = 0.01 * std::exp(-0.5 * grid.x(j) * grid.x(j) / 4.0);
    }
};

void BM_MaOperator(benchmark::State& st) {
    Fixture fx(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(ma_operator(kCao, fx.bg, fx.D, fx.phi, 0.0));
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_MaOperator)->RangeMultiplier(2)->Range(512, 4096)->Complexity(benchmark::oN);

void BM_LinearizedSolve(benchmark::State& st) {
    Fixture fx(int(st.range(0)));
    const auto A = assemble_linearized(kCao, fx.grid, fx.bg.metric, fx.D, 8, 8);
    std::vector<double> b(fx.grid.N, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(A.solve(b));
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_LinearizedSolve)->RangeMultiplier(2)->Range(512, 4096)->Complexity(benchmark::oN);

void BM_BackgroundPotential(benchmark::State& st) {
    Fixture fx(512);
    double x = -2.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(fx.bg.potential(x));
        x = x > 8.0 ? -2.0 : x + 0.37;
    }
}
BENCHMARK(BM_BackgroundPotential);

void BM_CaoSolve(benchmark::State& st) {
    SolverConfig cfg;
    cfg.ladder = {int(st.range(0))};
    SolveOptions opt;
    opt.diagnostics = false;
    for (auto _ : st) benchmark::DoNotOptimize(solve_soliton(kCao, cfg, opt));
}
BENCHMARK(BM_CaoSolve)->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_LineBundleSolve(benchmark::State& st) {
    SolverConfig cfg;
    cfg.ladder = {512, 1024};
    SolveOptions opt;
    opt.diagnostics = false;
    const auto spec = ConeSpec::line_bundle(2, 4, 1.0, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(solve_soliton(spec, cfg, opt));
}
BENCHMARK(BM_LineBundleSolve)->Unit(benchmark::kMillisecond);

void BM_CurvatureSpectrum(benchmark::State& st) {
    SolverConfig cfg;
    cfg.ladder = {1024};
    SolveOptions opt;
    opt.diagnostics = false;
    const auto sol = solve_soliton(kCao, cfg, opt);
    const auto radii = default_radii();
    for (auto _ : st) benchmark::DoNotOptimize(curvature_spectrum(sol, radii));
}
BENCHMARK(BM_CurvatureSpectrum)->Unit(benchmark::kMillisecond);

void BM_ChartOracle(benchmark::State& st) {
    SolverConfig cfg;
    cfg.ladder = {1024};
    SolveOptions opt;
    opt.diagnostics = false;
    const auto sol = solve_soliton(kCao, cfg, opt);
    for (auto _ : st) benchmark::DoNotOptimize(chart_oracle_check(sol, 10, 7));
}
BENCHMARK(BM_ChartOracle)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
