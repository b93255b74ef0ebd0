#include <benchmark/benchmark.h>

#include <complex>

#include "lambtrap/bessel.hpp"
#include "lambtrap/boundary_op.hpp"
#include "lambtrap/dispersion.hpp"
#include "lambtrap/dtn.hpp"
#include "lambtrap/modes.hpp"
#include "lambtrap/spectral.hpp"

using namespace lambtrap;

static const ThresholdData& thr() {
    static ThresholdData t = threshold();
    return t;
}

static void BM_RayleighLamb(benchmark::State& state) {
    std::complex<double> xi(0.9, 0.1), om(1.7, 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(rayleigh_lamb(xi, om));
}
BENCHMARK(BM_RayleighLamb);

static void BM_SymbolReal(benchmark::State& state) {
    const long double om = thr().lambda_precise - 1e-6L;
    double xi = 0.6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dtn_symbol_real(xi, om));
        xi = (xi < 12.0) ? xi + 1e-4 : 0.6;
    }
}
BENCHMARK(BM_SymbolReal);

static void BM_BesselVector(benchmark::State& state) {
    std::vector<double> buf(65);
    double x = 30.0;
    for (auto _ : state) {
        bessel_j_all(64, x, buf.data());
        benchmark::DoNotOptimize(buf.data());
        x = (x < 11000.0) ? x + 1.0 : 30.0;
    }
}
BENCHMARK(BM_BesselVector);

static void BM_BranchEigenvalue(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(zeta1(0.6321));
}
BENCHMARK(BM_BranchEigenvalue);

static void BM_AssembleQ0(benchmark::State& state) {
    BasisSpec2D basis{(int)state.range(0), SymmetryClass::symmetric};
    for (auto _ : state) benchmark::DoNotOptimize(assemble_q0(basis));
}
BENCHMARK(BM_AssembleQ0)->Arg(16)->Arg(32);

static void BM_AssembleQ(benchmark::State& state) {
    BasisSpec2D basis{32, SymmetryClass::symmetric};
    const auto q0 = assemble_q0(basis);
    const auto tails = make_residual_tails(basis, 0.05);
    const long double om = thr().lambda_precise - 1e-6L;
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_q_with_q0(basis, q0, tails, 0.05, om, thr()));
}
BENCHMARK(BM_AssembleQ);

static void BM_Mu1(benchmark::State& state) {
    static ClassSolver solver(BasisSpec2D{32, SymmetryClass::symmetric}, thr(),
                              threshold_mode(thr()));
    for (auto _ : state) benchmark::DoNotOptimize(solver.mu(0.05, 1e-4));
}
BENCHMARK(BM_Mu1);

static void BM_SolveDirect(benchmark::State& state) {
    static ClassSolver solver(BasisSpec2D{32, SymmetryClass::symmetric}, thr(),
                              threshold_mode(thr()));
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve_direct(0.05).gap);
}
BENCHMARK(BM_SolveDirect)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
