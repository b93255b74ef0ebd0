#include "lambtrap/asymptotics.hpp"

#include <cmath>

#include "lambtrap/errors.hpp"

namespace lambtrap {

AsymptoticConstants nu_constants_2d(const ThresholdData& thr, const ThresholdModeData& mode,
                                    const BasisSpec2D& basis_s, const Eigen::MatrixXd& q0_s,
                                    const BasisSpec2D& basis_as, const Eigen::MatrixXd& q0_as,
                                    double agreement_tol) {
    AsymptoticConstants c;
    const double d4 = std::pow(mode.abs_dpsi2, 4.0);
    const double k4 = std::pow(thr.kappa, 4.0);

    c.ingredients.lambda = thr.lambda;
    c.ingredients.kappa = thr.kappa;
    c.ingredients.zeta1_pp = thr.zeta1_pp;
    c.ingredients.abs_dpsi2 = mode.abs_dpsi2;
    c.ingredients.s_ct = q0_inverse_pairing(q0_s, coords_psi_ct(basis_s));
    c.ingredients.s_id = q0_inverse_pairing(q0_as, coords_psi_id(basis_as));

    c.nu1 = 32.0 * d4 / thr.zeta1_pp * c.ingredients.s_ct * c.ingredients.s_ct;
    c.nu2 = 32.0 * k4 * d4 / thr.zeta1_pp * c.ingredients.s_id * c.ingredients.s_id;
    c.nu1_closed = 8.0 * M_PI * M_PI * d4 / thr.zeta1_pp;
    c.nu2_closed = M_PI * M_PI * k4 * d4 / (8.0 * thr.zeta1_pp);

    if (std::abs(c.nu1 - c.nu1_closed) > agreement_tol * c.nu1_closed ||
        std::abs(c.nu2 - c.nu2_closed) > agreement_tol * c.nu2_closed)
        throw IngredientMismatch("nu_constants_2d: general and closed forms disagree");
    return c;
}

double rho_constant_3d(int m, const ThresholdData& thr, const ThresholdModeData& mode,
                       const BasisSpec3D& basis, const Eigen::MatrixXd& q0_m) {
    const int am = std::abs(m);
    const double s_m = q0_inverse_pairing(q0_m, coords_psi_m(basis));
    const double d4 = std::pow(mode.abs_dpsi2, 4.0);
    const double rho = 8.0 * std::pow(thr.kappa, 4.0 * am + 2.0) * d4 /
                       (std::pow(2.0, 4.0 * am) * thr.zeta1_pp) * s_m * s_m;
    if (!(rho > 0.0)) throw IngredientMismatch("rho_constant_3d: constant not positive");
    return rho;
}

} // namespace lambtrap
