#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lambtrap/boundary_op.hpp"
#include "lambtrap/modes.hpp"

namespace lambtrap {

struct EigenResult {
    std::string label;
    double ell = 0.0;
    double lambda = 0.0;
    double gap = 0.0; // Lambda - lambda, always positive
    double mu1_residual = 0.0;
    std::string route; // "direct" | "birman_schwinger"
};

struct SolveOptions {
    double gap_floor = 1e-16;
    double gap_ceiling = 0.05;
    double bisect_tol = 1e-12;  // relative, in log-gap coordinates
    int fixed_point_cap = 40;
    double fixed_point_tol = 1e-10;
};

// One symmetry class (2D parity) or angular channel (3D), with the
// ell-independent pieces assembled once.  Eigenvalue searches run in
// log-gap coordinates: the antisymmetric gap at ell = 0.025 is ~3e-14,
// far below any additive resolution of omega near Lambda.
class ClassSolver {
  public:
    ClassSolver(BasisSpec2D basis, const ThresholdData& thr, const ThresholdModeData& mode,
                QOptions qopts = {}, Q0Options q0opts = {});
    ClassSolver(BasisSpec3D basis, const ThresholdData& thr, const ThresholdModeData& mode,
                QOptions qopts = {}, Q0Options q0opts = {});

    int dim() const { return dim_; }
    std::string label() const;
    const ThresholdData& threshold() const { return thr_; }
    const Eigen::MatrixXd& q0() const { return q0_; }
    const Eigen::MatrixXd& mass() const { return mass_; }
    Eigen::VectorXd rank_one(double ell) const;

    Eigen::MatrixXd assemble(double ell, long double omega) const;
    // k-th generalized eigenvalue of (Q(ell, omega), M), ascending, k 0-based.
    double mu(double ell, double gap, int k = 0) const;

    // Rank-one coupling constant of the Birman-Schwinger reduction:
    // 8 l^2 |d2 psi|^2 / sqrt(2 zeta'') in 2D, 4 kappa l^3 |d3 psi|^2 /
    // sqrt(2 zeta'') per channel in 3D.
    double coupling(double ell) const;

    EigenResult solve_direct(double ell, const SolveOptions& opts = {}) const;
    EigenResult solve_birman_schwinger(double ell, const SolveOptions& opts = {}) const;

    // ell R(ell, omega) = ell Q - Q0 + coupling/sqrt(gap) * v v^T; its
    // mass-weighted operator norm divided by ell is the remainder norm of
    // the threshold expansion.
    double remainder_norm(double ell, double gap) const;

  private:
    const ResidualTails& tails_for(double ell) const;

    int dim_;
    std::variant<BasisSpec2D, BasisSpec3D> basis_;
    ThresholdData thr_;
    ThresholdModeData mode_;
    QOptions qopts_;
    Eigen::MatrixXd q0_, mass_;
    // the omega-independent tail pair integrals are reused across the
    // bisection in omega at fixed ell
    mutable std::map<double, ResidualTails> tails_;
    mutable std::mutex tails_mutex_;
};

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    std::vector<double> ell_grid;
    std::vector<double> residuals; // log-gap residuals of the fit
};

// Least-squares line through (log ell, log gap).
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pairs);

} // namespace lambtrap
