#include <doctest.h>

#include <cmath>

#include "lambtrap/asymptotics.hpp"
#include "lambtrap/errors.hpp"
#include "lambtrap/spectral.hpp"
#include "oracles.hpp"

using namespace lambtrap;

namespace {

const ClassSolver& solver_s() {
    static ClassSolver s(BasisSpec2D{32, SymmetryClass::symmetric}, oracles::thr(),
                         oracles::mode());
    return s;
}
const ClassSolver& solver_as() {
    static ClassSolver s(BasisSpec2D{32, SymmetryClass::antisymmetric}, oracles::thr(),
                         oracles::mode());
    return s;
}
const ClassSolver& solver_m0() {
    static ClassSolver s(BasisSpec3D(0, 32), oracles::thr(), oracles::mode());
    return s;
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("mu1 decreases towards the threshold and diverges") {
    const auto& s = solver_s();
    // omega_1 < omega_2 <=> gap_1 > gap_2; mu1 strictly decreasing in omega
    CHECK(s.mu(0.05, 1e-2) > s.mu(0.05, 1e-4));
    const double m1 = s.mu(0.05, 1e-2), m2 = s.mu(0.05, 1e-4), m3 = s.mu(0.05, 1e-6);
    CHECK(m1 > m2);
    CHECK(m2 > m3);
    CHECK(m3 < m1 - 10.0);
}

TEST_CASE("mu2 stays positive near the threshold") {
    for (double gap : {1e-2, 1e-4, 1e-6}) {
        CHECK(solver_s().mu(0.05, gap, 1) > 0.0);
        CHECK(solver_as().mu(0.05, gap, 1) > 0.0);
        CHECK(solver_s().mu(0.025, gap, 1) > 0.0);
    }
}

TEST_CASE("single sign change of mu1 in the search window") {
    const auto& s = solver_s();
    const double ell = 0.05;
    auto r = s.solve_direct(ell);
    int changes = 0;
    double prev = s.mu(ell, 1e-15);
    for (double t = -15.0 + 0.5; t <= std::log10(0.05) + 1e-9; t += 0.5) {
        const double cur = s.mu(ell, std::pow(10.0, t));
        if (prev * cur < 0.0) ++changes;
        prev = cur;
    }
    CHECK(changes == 1);
    // sign pattern around the eigenvalue: mu1 < 0 closer to Lambda
    CHECK(s.mu(ell, r.gap * 0.9) < 0.0);
    CHECK(s.mu(ell, r.gap * 1.1) > 0.0);
}

TEST_CASE("direct route basics and class ordering") {
    auto rs = solver_s().solve_direct(0.05);
    auto ra = solver_as().solve_direct(0.05);
    CHECK(rs.gap > 0.0);
    CHECK(rs.lambda < oracles::thr().lambda);
    CHECK(std::abs(rs.mu1_residual) < 1e-6);
    // l^4 vs l^8 scaling separates the classes by many orders
    CHECK(rs.gap > 1e5 * ra.gap);
}

TEST_CASE("the two routes agree") {
    for (double ell : {0.1, 0.05}) {
        auto d = solver_s().solve_direct(ell);
        auto b = solver_s().solve_birman_schwinger(ell);
        CHECK(std::abs(d.gap - b.gap) / d.gap < 0.05);
        CHECK(std::abs(d.gap - b.gap) / d.gap < 1e-9); // observed: far tighter
        auto da = solver_as().solve_direct(ell);
        auto ba = solver_as().solve_birman_schwinger(ell);
        CHECK(std::abs(da.gap - ba.gap) / da.gap < 0.05);
    }
    auto d3 = solver_m0().solve_direct(0.05);
    auto b3 = solver_m0().solve_birman_schwinger(0.05);
    CHECK(std::abs(d3.gap - b3.gap) / d3.gap < 0.05);
}

TEST_CASE("gaps follow the expected power laws against the frozen constants") {
    auto r1 = solver_s().solve_direct(0.05);
    CHECK(r1.gap == doctest::Approx(oracles::kNu1Ref * std::pow(0.05, 4)).epsilon(0.02));
    auto r2 = solver_as().solve_direct(0.05);
    CHECK(r2.gap == doctest::Approx(oracles::kNu2Ref * std::pow(0.05, 8)).epsilon(0.01));
    auto r3 = solver_m0().solve_direct(0.1);
    CHECK(r3.gap == doctest::Approx(oracles::kRho0Ref * std::pow(0.1, 6)).epsilon(0.02));
}

TEST_CASE("Birman-Schwinger leading order reproduces the pi/2 formula") {
    const auto& t = oracles::thr();
    const auto& md = oracles::mode();
    const double ell = 0.025;
    auto r = solver_s().solve_birman_schwinger(ell);
    const double lead = 8.0 * md.abs_dpsi2 * md.abs_dpsi2 / std::sqrt(2.0 * t.zeta1_pp) *
                        (M_PI / 2.0) * ell * ell;
    CHECK(std::sqrt(r.gap) == doctest::Approx(lead).epsilon(0.02));
}

TEST_CASE("coupling vanishes as ell -> 0 and the gap follows") {
    CHECK(solver_s().coupling(1e-4) < 1e-7);
    auto r1 = solver_s().solve_direct(0.02);
    auto r2 = solver_s().solve_direct(0.01);
    CHECK(r2.gap < r1.gap);
    CHECK(r2.gap == doctest::Approx(r1.gap / 16.0).epsilon(0.05)); // ~ l^4
}

TEST_CASE("no sign change errors") {
    CHECK_THROWS_AS(solver_s().solve_direct(8.0), NoSignChange);
    // antisymmetric gap at tiny ell sits below the resolvable floor
    CHECK_THROWS_AS(solver_as().solve_direct(1e-3), NoSignChange);
}

TEST_CASE("expansion remainder stays bounded while the singular factor grows 100x") {
    double worst = 0.0;
    for (double ell : {0.1, 0.05, 0.025})
        for (double gap : {1e-2, 1e-4, 1e-6})
            worst = std::max(worst, solver_s().remainder_norm(ell, gap));
    CHECK(worst < 5.0);
}

TEST_CASE("higher channel solves; displayed rho_2 carries the (m!)^4 Taylor factor") {
    ClassSolver s2(BasisSpec3D(2, 24), oracles::thr(), oracles::mode());
    BasisSpec3D b2(2, 24);
    const double rho2_displayed =
        rho_constant_3d(2, oracles::thr(), oracles::mode(), b2, assemble_q0(b2));
    const double ell = 0.4;
    auto r = s2.solve_direct(ell);
    // J_2's leading Taylor coefficient carries 1/2!, which the displayed
    // constant omits; the true gap is the displayed one over (2!)^4 = 16
    CHECK(r.gap == doctest::Approx(rho2_displayed * std::pow(ell, 14.0) / 16.0).epsilon(0.05));
}

TEST_CASE("power-law fit on exact data") {
    std::vector<std::pair<double, double>> pts;
    for (double l : {0.1, 0.07, 0.05, 0.035, 0.025}) pts.push_back({l, 3.0 * std::pow(l, 4)});
    auto fit = fit_power_law(pts);
    CHECK(fit.exponent == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("degenerate fits rejected") {
    std::vector<std::pair<double, double>> few = {{0.1, 1e-4}, {0.09, 8e-5}, {0.08, 6e-5}};
    CHECK_THROWS_AS(fit_power_law(few), DegenerateFit);
    std::vector<std::pair<double, double>> narrow = {
        {0.1, 1e-4}, {0.09, 8e-5}, {0.08, 6e-5}, {0.07, 4e-5}};
    CHECK_THROWS_AS(fit_power_law(narrow), DegenerateFit);
    std::vector<std::pair<double, double>> bad = {
        {0.2, 1e-4}, {0.1, 8e-5}, {0.05, -1e-5}, {0.025, 4e-5}};
    CHECK_THROWS_AS(fit_power_law(bad), DegenerateFit);
}

TEST_CASE("galerkin convergence of mu1 at the doubled truncation") {
    ClassSolver s32(BasisSpec2D{32, SymmetryClass::symmetric}, oracles::thr(), oracles::mode());
    ClassSolver s64(BasisSpec2D{64, SymmetryClass::symmetric}, oracles::thr(), oracles::mode());
    const double a = s32.mu(0.05, 1e-3);
    const double b = s64.mu(0.05, 1e-3);
    CHECK(std::abs(a - b) < 1e-6 * std::max(1.0, std::abs(b)));
    ClassSolver t32(BasisSpec3D(0, 32), oracles::thr(), oracles::mode());
    ClassSolver t64(BasisSpec3D(0, 64), oracles::thr(), oracles::mode());
    const double c = t32.mu(0.05, 1e-3);
    const double d = t64.mu(0.05, 1e-3);
    CHECK(std::abs(c - d) < 1e-6 * std::max(1.0, std::abs(d)));
}

} // TEST_SUITE
