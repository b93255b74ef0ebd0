#include "lambtrap/modes.hpp"

#include <cmath>

#include "lambtrap/errors.hpp"
#include "lambtrap/quadrature.hpp"

namespace lambtrap {

using cd = std::complex<double>;
static constexpr double PIH = 1.5707963267948966;

ModeProfile::ModeProfile(double xi, double omega, double psi_tol) : xi_(xi), omega_(omega) {
    cd psi = rayleigh_lamb(cd(xi), cd(omega));
    if (std::abs(psi) > psi_tol)
        throw NotAnEigenpair("ModeProfile: |Psi(xi, omega)| above tolerance");
    beta_ = branch_sqrt(cd(omega - xi * xi));
    gamma_ = branch_sqrt(cd(0.5 * omega - xi * xi));
    if (std::abs(gamma_) < 1e-2)
        throw GammaZero("ModeProfile: gamma too close to 0 (omega = 2 xi^2 case excluded)");
    a1_ = std::cos(PIH * gamma_); // multiplies the beta-oscillation
    a2_ = std::cos(PIH * beta_);  // multiplies the gamma-oscillation
}

cd ModeProfile::u1(double x2) const {
    const cd i(0.0, 1.0);
    return i * gamma_ * gamma_ * beta_ * a1_ * std::cos(beta_ * x2) +
           i * xi_ * xi_ * beta_ * a2_ * std::cos(gamma_ * x2);
}

cd ModeProfile::u2(double x2) const {
    return xi_ * gamma_ * gamma_ * a1_ * std::sin(beta_ * x2) -
           xi_ * beta_ * gamma_ * a2_ * std::sin(gamma_ * x2);
}

cd ModeProfile::du1(double x2) const {
    const cd i(0.0, 1.0);
    return -i * gamma_ * gamma_ * beta_ * beta_ * a1_ * std::sin(beta_ * x2) -
           i * xi_ * xi_ * beta_ * gamma_ * a2_ * std::sin(gamma_ * x2);
}

cd ModeProfile::du2(double x2) const {
    return xi_ * gamma_ * gamma_ * beta_ * a1_ * std::cos(beta_ * x2) -
           xi_ * beta_ * gamma_ * gamma_ * a2_ * std::cos(gamma_ * x2);
}

cd ModeProfile::d2u1(double x2) const {
    const cd i(0.0, 1.0);
    return -i * gamma_ * gamma_ * beta_ * beta_ * beta_ * a1_ * std::cos(beta_ * x2) -
           i * xi_ * xi_ * beta_ * gamma_ * gamma_ * a2_ * std::cos(gamma_ * x2);
}

cd ModeProfile::d2u2(double x2) const {
    return -xi_ * gamma_ * gamma_ * beta_ * beta_ * a1_ * std::sin(beta_ * x2) +
           xi_ * beta_ * gamma_ * gamma_ * gamma_ * a2_ * std::sin(gamma_ * x2);
}

double ModeProfile::norm_half(int quad_order) const {
    auto f = [this](double x) { return std::norm(u1(x)) + std::norm(u2(x)); };
    return std::sqrt(integrate(f, 0.0, PIH, quad_order));
}

ThresholdModeData threshold_mode(const ThresholdData& thr, int quad_order) {
    ModeProfile psi(thr.kappa, thr.lambda, 1e-6);
    const double n1 = psi.norm_half(quad_order);
    const double n2 = psi.norm_half(2 * quad_order);
    ThresholdModeData md;
    md.quadrature_drift = std::abs(n2 - n1) / n2;
    if (md.quadrature_drift > 1e-12)
        throw ConvergenceFailure("threshold_mode: quadrature orders disagree");
    md.normalization = 1.0 / n2;

    const cd raw = psi.du2(0.0) * md.normalization;
    md.abs_dpsi2 = std::abs(raw);
    md.dpsi2_at_0 = cd(0.0, md.abs_dpsi2); // fixed phase convention

    // Displayed closed form: kappa (L/2 - k^2) sqrt(L - k^2)
    //   [cos(pi/2 sqrt(L/2 - k^2)) - cos(pi/2 sqrt(L - k^2))], up to the
    // normalising factor.
    const double k = thr.kappa, L = thr.lambda;
    const double g2 = 0.5 * L - k * k;
    const double b = std::sqrt(L - k * k);
    const double cf = k * g2 * b * (std::cos(PIH * std::sqrt(g2)) - std::cos(PIH * b));
    md.closed_form_check = std::abs(std::abs(cf) * md.normalization - md.abs_dpsi2) / md.abs_dpsi2;
    if (md.closed_form_check > 1e-10)
        throw IngredientMismatch("threshold_mode: closed form disagrees with analytic derivative");
    return md;
}

Mode3DValue eigenfunction_3d(double xi1, double xi2, double omega, double x3) {
    const double r = std::hypot(xi1, xi2);
    const double alpha = std::atan2(xi2, xi1);
    ModeProfile p(r, omega);
    const cd w1 = p.u1(x3), w2 = p.u2(x3);
    return {std::cos(alpha) * w1, std::sin(alpha) * w1, w2};
}

} // namespace lambtrap
