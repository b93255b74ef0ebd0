#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <complex>
#include <vector>

#include "lambtrap/dispersion.hpp"
#include "lambtrap/modes.hpp"

namespace oracles {

// Shared threshold/mode data (computed once per test binary).
const lambtrap::ThresholdData& thr();
const lambtrap::ThresholdModeData& mode();

// Literal Rayleigh-Lamb form with explicit square roots under the branch
// convention (oracle for the squared-variable series evaluation).
std::complex<double> rayleigh_lamb_literal(std::complex<double> xi, std::complex<double> omega);

// Bessel J_m by a 40-term ascending series in extended precision.
long double bessel_j_series(int m, long double x);

// (1/2pi) int_0^{2pi} e^{-i m t} e^{i x sin t} dt by the trapezoidal rule.
double bessel_j_integral(int m, double x, int panels = 4096);

// First eigenvalues of the half-interval channel-2 strip operator by a P1
// finite element discretisation with mean deflation, Richardson-extrapolated
// over two mesh sizes.
std::vector<double> ode_eigenvalues_fem(double xi, int count, int elements = 300);
// Same without the mean deflation: the constant channel stays in, so the
// spectrum contains the flat eigenvalue 2 xi^2.
std::vector<double> ode_eigenvalues_fem_undeflated(double xi, int count, int elements = 300);

// Brute-force int_0^inf J_a(t) J_b(t)/t dt (panel quadrature + leading tail).
double weber_schafheitlin_brute(int a, int b, double cutoff = 3000.0);

// Reference values frozen from the independent prototype oracle runs.
inline constexpr double kKappaRef = 0.6321383562032541;
inline constexpr double kLambdaRef = 1.8878371694031395;
inline constexpr double kZppRef = 1.4441444204;
inline constexpr double kDpsiRef = 1.0660947079851741;
inline constexpr double kNu1Ref = 70.62561716414596;
inline constexpr double kNu2Ref = 0.1762101224788152;
inline constexpr double kS0Ref = 4.0 / 3.0;
inline constexpr double kS1Ref = 16.0 / 45.0;
inline constexpr double kS2Ref = 256.0 / 1575.0;
inline constexpr double kRho0Ref = 5.08351687;
inline constexpr double kRho1Ref = 0.00360770;

} // namespace oracles
