#include <benchmark/benchmark.h>

#include "semiscat/classical.hpp"
#include "semiscat/jost.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/propagator.hpp"
#include "semiscat/resonance.hpp"
#include "semiscat/scattering.hpp"
#include "semiscat/semiclassics.hpp"

using namespace semiscat;

namespace {

static void BM_PotentialEval(benchmark::State& state) {
    const Potential pot = truncate(Potential::well_in_island(), 8.0);
    double x = -8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pot.evaluate(x));
        x += 1e-3;
        if (x > 8.0) x = -8.0;
    }
}
BENCHMARK(BM_PotentialEval);

static void BM_JostSolve(benchmark::State& state) {
    const Potential pot = truncate(Potential::gaussian_barrier(1.0, 1.0), 6.0);
    const double h = 0.1;
    const EnergyPoint ep = EnergyPoint::upper(1.0, h);
    const GridSpec gs = choose_jost_grid(pot, ep.z, h, 1e-9);
    const SegmentedGrid grid(pot, gs.L, gs.dx);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jost_right(pot, ep, grid));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(grid.n_steps()));
}
BENCHMARK(BM_JostSolve);

static void BM_Smatrix(benchmark::State& state) {
    const Potential pot = Potential::square_barrier(2.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(smatrix(pot, 1.0, 0.25));
    }
}
BENCHMARK(BM_Smatrix);

static void BM_JostDeterminant(benchmark::State& state) {
    const Potential pot = truncate(Potential::gaussian_barrier(1.0, 1.0), 6.0);
    const double h = 0.1;
    DeterminantEvaluator det(pot, h, 1.2);
    cdouble z(1.0, -0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(det(z));
    }
}
BENCHMARK(BM_JostDeterminant);

static void BM_LnGamma(benchmark::State& state) {
    cdouble z(0.5, -2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lngamma(z));
        z += cdouble(1e-6, 1e-6);
    }
}
BENCHMARK(BM_LnGamma);

static void BM_HomoclinicLineShape(benchmark::State& state) {
    HomoclinicData hd;
    hd.E0 = 1.0;
    hd.mu = 2.0;
    hd.A0 = 5.3;
    hd.g0_minus = hd.g0_plus = -1.4;
    hd.g_in = hd.g_out = 2.2;
    double lam = 0.99;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssf_homoclinic(hd, lam, 0.01));
        lam += 1e-7;
    }
}
BENCHMARK(BM_HomoclinicLineShape);

static void BM_Diagonalize(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const GridHamiltonian ham = build_grid_hamiltonian(
        Potential::square_barrier(0.5, 1.0), 0.2, 10.0, n, 1.0, false);
    for (auto _ : state) {
        benchmark::DoNotOptimize(diagonalize(ham));
    }
}
BENCHMARK(BM_Diagonalize)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_LeapfrogFlow(benchmark::State& state) {
    const Potential pot = Potential::double_structure();
    for (auto _ : state) {
        benchmark::DoNotOptimize(flow(pot, {-2.0, 0.9}, 10.0, 1e-3));
    }
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_LeapfrogFlow);

} // namespace

BENCHMARK_MAIN();
