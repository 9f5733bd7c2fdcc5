#include <benchmark/benchmark.h>

#include <numbers>

#include "slc/barriers.hpp"
#include "slc/foliation.hpp"
#include "slc/graphsolve.hpp"
#include "slc/kpmetric.hpp"
#include "slc/symcurv.hpp"

using namespace slc;

namespace {

constexpr double kTheta = 3 * std::numbers::pi / 4;

void BM_RThetaSpectrum(benchmark::State& state) {
    const AngleParams p(kTheta + std::numbers::pi / 2 * (state.range(0) - 2), static_cast<int>(state.range(0)));
    std::vector<double> lam;
    for (int i = 0; i < state.range(0); ++i) lam.push_back(0.5 + 0.3 * i);
    const Spectrum s(lam);
    for (auto _ : state) benchmark::DoNotOptimize(r_theta(s, p));
}
BENCHMARK(BM_RThetaSpectrum)->DenseRange(2, 8, 3);

void BM_Jacobi(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SymMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a.set(i, j, i == j ? 2.0 + i : 0.1 / (1 + i + j));
    for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(a));
}
BENCHMARK(BM_Jacobi)->DenseRange(2, 8, 3);

void BM_NewtonDisk(benchmark::State& state) {
    const AngleParams p(kTheta, 2);
    const GridSpec grid{GraphMode::Disk2D, 2, static_cast<int>(state.range(0)), 0.5, OuterBoundary::Dirichlet};
    const auto b = fixed_boundary(1.0, 0.05);
    GraphField g = GraphField::constant(grid, 1.0);
    for (int k = 0; k < g.size(); ++k)
        if (g.is_boundary(k)) g.set_height(k, b(3.0, g.angle(k)));
    const GraphField start = harmonic_extension(g);
    SolverConfig cfg;
    cfg.theta = kTheta;
    cfg.target_r = 3.0;
    for (auto _ : state) benchmark::DoNotOptimize(newton_solve(start, cfg));
}
BENCHMARK(BM_NewtonDisk)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_KpRoundBall(benchmark::State& state) {
    const auto dom = SphericalDomain::ball(RoundBall({0.0, 0.0, 1.0}, std::numbers::pi / 2));
    const std::vector<double> q{0.3, 0.4};
    for (auto _ : state) benchmark::DoNotOptimize(kp_metric(dom, q));
}
BENCHMARK(BM_KpRoundBall)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
