#pragma once

#include <map>

#include "lambtrap/boundary_op.hpp"
#include "lambtrap/modes.hpp"

namespace lambtrap {

struct AsymptoticIngredients {
    double lambda = 0.0;
    double kappa = 0.0;
    double zeta1_pp = 0.0;
    double abs_dpsi2 = 0.0;
    double s_ct = 0.0; // <Q0^{-1} Psi_ct, Psi_ct>, exact value pi/2
    double s_id = 0.0; // <Q0^{-1} Psi_id, Psi_id>, exact value pi/16
    std::map<int, double> s_m;
};

struct AsymptoticConstants {
    double nu1 = 0.0;
    double nu2 = 0.0;
    double nu1_closed = 0.0; // 8 pi^2 |dpsi|^4 / zeta''
    double nu2_closed = 0.0; // pi^2 kappa^4 |dpsi|^4 / (8 zeta'')
    std::map<int, double> rho;
    AsymptoticIngredients ingredients;
};

// nu_1 = 32 |dpsi|^4/zeta'' <Q0^{-1} Psi_ct, Psi_ct>^2 and the kappa^4
// variant for nu_2, evaluated with the Galerkin pairings and cross-checked
// against the interval closed forms (pi/2 and pi/16).
AsymptoticConstants nu_constants_2d(const ThresholdData& thr, const ThresholdModeData& mode,
                                    const BasisSpec2D& basis_s, const Eigen::MatrixXd& q0_s,
                                    const BasisSpec2D& basis_as, const Eigen::MatrixXd& q0_as,
                                    double agreement_tol = 1e-6);

// rho_m = 8 kappa^{4|m|+2} |dpsi|^4 / (2^{4|m|} zeta'') <Q0^{-1} Psi_m, Psi_m>^2,
// ell-independent: the ell power belongs to the eigenvalue law, not to the
// constant.
double rho_constant_3d(int m, const ThresholdData& thr, const ThresholdModeData& mode,
                       const BasisSpec3D& basis, const Eigen::MatrixXd& q0_m);

} // namespace lambtrap
