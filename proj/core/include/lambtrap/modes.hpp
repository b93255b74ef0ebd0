#pragma once

#include <complex>

#include "lambtrap/dispersion.hpp"

namespace lambtrap {

// Closed-form dispersion eigenfunction of the channel-2 strip operator at an
// eigenpair (xi, omega).  First component even, second odd; derivatives are
// analytic, so residual and boundary checks need no numerical
// differentiation.
class ModeProfile {
  public:
    // tol bounds |Psi(xi, omega)|; the formula requires gamma != 0.
    ModeProfile(double xi, double omega, double psi_tol = 1e-6);

    std::complex<double> u1(double x2) const;
    std::complex<double> u2(double x2) const;
    std::complex<double> du1(double x2) const;
    std::complex<double> du2(double x2) const;
    std::complex<double> d2u1(double x2) const;
    std::complex<double> d2u2(double x2) const;

    double xi() const { return xi_; }
    double omega() const { return omega_; }
    std::complex<double> beta() const { return beta_; }
    std::complex<double> gamma() const { return gamma_; }

    // L2 norm over the half-interval I+ = (0, pi/2).
    double norm_half(int quad_order = 64) const;

  private:
    double xi_, omega_;
    std::complex<double> beta_, gamma_;
    std::complex<double> a1_, a2_; // cos(pi gamma/2) and cos(pi beta/2) prefactors
};

struct ThresholdModeData {
    std::complex<double> dpsi2_at_0; // phase-fixed: on the positive imaginary axis
    double abs_dpsi2 = 0.0;
    double normalization = 0.0; // 1 / ||psi||_{L2(I+)} applied to the raw profile
    double closed_form_check = 0.0; // |analytic derivative| vs displayed closed form, relative
    double quadrature_drift = 0.0;  // relative change of the norm when doubling the order
};

// Normalised threshold mode psi_kappa and the boundary stress derivative
// d2 psi_{kappa,2}(0).  The phase is fixed so the derivative lies on the
// positive imaginary axis; only its modulus enters any constant downstream.
ThresholdModeData threshold_mode(const ThresholdData& thr, int quad_order = 64);

// 3D eigenfunction: block rotation (M_alpha (+) 1) applied to the embedded 2D
// profile at |xi|, alpha the polar angle of the wavevector.
struct Mode3DValue {
    std::complex<double> v1, v2, v3;
};
Mode3DValue eigenfunction_3d(double xi1, double xi2, double omega, double x3);

} // namespace lambtrap
