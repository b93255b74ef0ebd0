#pragma once

#include <Eigen/Dense>
#include <complex>

namespace lambtrap {

// The 4x4 boundary system of the per-frequency Poisson problem on the upper
// half-strip: L(xi, omega) a = b with b = (0, 0, 0, ghat), plus the traction
// row R with hhat = R a.  The omega = 0 case uses the exponential/polynomial
// fundamental system.
struct BoundarySystem {
    Eigen::Matrix4cd L;
    Eigen::Vector4cd b;
    Eigen::Vector4cd a;
    Eigen::RowVector4cd R;
    std::complex<double> det_factor; // the Rayleigh-Lamb bracket of det L
};

BoundarySystem boundary_system(std::complex<double> xi, std::complex<double> omega,
                               std::complex<double> ghat = 1.0);

// Displayed factorisation 32 gamma^2 (gamma^2 + xi^2) [sin(b pi/2) cos(g pi/2) gamma^3
// + cos(b pi/2) sin(g pi/2) beta xi^2], evaluated in squared variables.
std::complex<double> boundary_determinant_identity(std::complex<double> xi,
                                                   std::complex<double> omega);

// Evaluate the displacement profile sum_k a_k v^k(x2) and its x2-derivative.
Eigen::Vector2cd boundary_profile(const BoundarySystem& sys, std::complex<double> xi,
                                  std::complex<double> omega, double x2);
Eigen::Vector2cd boundary_profile_deriv(const BoundarySystem& sys, std::complex<double> xi,
                                        std::complex<double> omega, double x2);

struct SymbolValue {
    double xi = 0.0;
    std::complex<double> omega;
    std::complex<double> value;
};

// DtN symbol m_omega(xi) in singularity-free squared-variable form.  Requires
// |omega| >= omega_min (the closed form degenerates to 0/0 as omega -> 0;
// callers needing omega = 0 use dtn_symbol_static).
inline constexpr double kSymbolOmegaMin = 1e-3;
SymbolValue dtn_symbol(double xi, std::complex<double> omega);

// Real-line path in extended precision; the denominator cancels to
// O(Lambda - omega) near (kappa, Lambda) and gaps reach 1e-14.
double dtn_symbol_real(double xi, long double omega);

// Static symbol m_0(xi) = xi (cosh(pi xi) - 1 - pi^2 xi^2/2)/(sinh(pi xi) + pi xi),
// series below |xi| = 1e-2, exponential-ratio form for large |xi|.
double dtn_symbol_static(double xi);

} // namespace lambtrap
