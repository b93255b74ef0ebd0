#pragma once

#include <array>
#include <complex>
#include <vector>

namespace lambtrap {

// Strip geometry and material constants, fixed throughout: strip
// half-width pi/2, zero Poisson ratio (lame_lambda = 0, lame_mu = 1), and the
// principal square-root branch with Im(sqrt(z)) >= 0 on the negative axis.
struct DispersionContext {
    static constexpr double half_width() { return 1.5707963267948966; }
    static constexpr double lame_lambda() { return 0.0; }
    static constexpr double lame_mu() { return 1.0; }
};

// sqrt under the module branch convention: principal for z off (-inf,0],
// Im >= 0 on the cut.
std::complex<double> branch_sqrt(std::complex<double> z);

// Entire building blocks of the dispersion relation as functions of the
// squared variable: S(z^2) = sin(z pi/2)/z and C(z^2) = cos(z pi/2).
namespace entire {
std::complex<double> S(std::complex<double> w);
std::complex<double> C(std::complex<double> w);
std::complex<double> dS(std::complex<double> w); // dS/dw
long double S_ld(long double w);
long double C_ld(long double w);
} // namespace entire

// Rayleigh-Lamb function Psi(xi, omega) = S(b) C(g) g + C(b) S(g) xi^2 with
// b = omega - xi^2, g = omega/2 - xi^2.  Entire in both variables; total.
std::complex<double> rayleigh_lamb(std::complex<double> xi, std::complex<double> omega);
std::complex<double> rayleigh_lamb_dxi(std::complex<double> xi, std::complex<double> omega);
std::complex<double> rayleigh_lamb_domega(std::complex<double> xi, std::complex<double> omega);
// Real-line evaluation in extended precision (used near the threshold where
// the two terms cancel to O(Lambda - omega)).
long double rayleigh_lamb_real(long double xi, long double omega);

struct BranchPoint {
    double xi = 0.0;
    int k = 0;          // 1-based branch index
    double omega = 0.0; // zeta_k(xi)
    double residual = 0.0;
};

struct BranchOptions {
    double omega_min = 1e-9;
    double scan_step = 0.01;
    double scan_margin = 50.0; // scan window is (omega_min, 2 xi^2 + margin]
    double root_tol = 1e-12;
};

// The n lowest dispersion branches zeta_1(xi) < ... < zeta_n(xi), located by
// sign-change bracketing on an omega grid and polished by bisection.
std::vector<BranchPoint> branch_eigenvalues(double xi, int count, const BranchOptions& opts = {});

double zeta1(double xi, const BranchOptions& opts = {});
long double zeta1_precise(long double xi, double seed);

struct ThresholdOptions {
    double window_lo = 1e-3;
    double window_hi = 2.0;
    double xi_tol = 1e-10;
    double fd_step = 0.02; // Richardson uses fd_step and fd_step/2
};

struct ThresholdData {
    double lambda = 0.0;
    double kappa = 0.0;
    double zeta1_pp = 0.0; // zeta_1''(kappa), Richardson-extrapolated
    // Extended-precision anchors.  Gaps Lambda - lambda(ell) reach 1e-14 on
    // the sweep grids, so the threshold itself must be resolved well below
    // machine epsilon of a double-precision minimisation.
    long double lambda_precise = 0.0L;
    long double kappa_precise = 0.0L;
    double residual = 0.0;        // |Psi(kappa, Lambda)|
    double zeta1_pp_halfstep = 0.0; // FD value at fd_step/2 before extrapolation
    double zeta1_pp_fullstep = 0.0;
    double grid_step = 0.0;
};

ThresholdData threshold(const ThresholdOptions& opts = {});

struct ComplexRootSet {
    std::complex<double> omega;
    std::array<std::complex<double>, 4> roots;
    double strip_height = 0.0;
    double contour_count = 0.0; // argument-principle value before rounding
};

struct RootOptions {
    double theta = 0.5;       // strip half-height
    double epsilon = 0.05;    // admissible |omega - Lambda|
    double rect_halfwidth = 0.35;
    double newton_tol = 1e-12;
    double count_tol = 0.1;
    int max_panels = 64;
};

// The four roots of Psi(., omega) in R + i[-theta, theta] for omega near the
// threshold, Newton-seeded from the local parametrisation
// xi = +-kappa +- i sqrt(Lambda-omega) (zeta1''/2)^{-1/2}, certified by an
// argument-principle contour count over two rectangles around +-kappa.
ComplexRootSet complex_roots_near_threshold(std::complex<double> omega,
                                            const ThresholdData& thr,
                                            const RootOptions& opts = {});

// Argument-principle count of Psi(., omega) zeros in
// [re_lo, re_hi] x [-theta, theta].
double contour_root_count(std::complex<double> omega, double re_lo, double re_hi,
                          double theta, const RootOptions& opts = {});

} // namespace lambtrap
