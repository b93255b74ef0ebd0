#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lambtrap/dispersion.hpp"
#include "lambtrap/quadrature.hpp"

namespace lambtrap {

enum class SymmetryClass { symmetric, antisymmetric };

// 2D crack basis on Gamma = (-1,1): phi_j(x) = U_n(x) sqrt(1-x^2) with
// U_n the Chebyshev polynomial of the second kind, n = 2j (+1 for the
// antisymmetric class).  The square-root weight is the H^{1/2}_0 edge
// behaviour; the Fourier transform is sqrt(pi/2) (-i)^n (n+1) J_{n+1}(xi)/xi,
// which makes Q_0 diagonal up to quadrature error.
struct BasisSpec2D {
    int size = 32;
    SymmetryClass cls = SymmetryClass::symmetric;

    int u_order(int j) const { return cls == SymmetryClass::symmetric ? 2 * j : 2 * j + 1; }
    int bessel_order(int j) const { return u_order(j) + 1; }
    int max_bessel_order() const { return bessel_order(size - 1); }
    // phi_j(x) on (-1,1)
    double eval(int j, double x) const;
    // modulus part of the transform: sqrt(pi/2) (n+1) J_{n+1}(xi)/xi
    double transform(int j, double xi) const;
    // sign i^(um-un) of phi^_n conj(phi^_m) relative to t_n t_m, as a function
    // of the U-orders; zero across parities.
    static double pair_sign_orders(int un, int um) {
        if ((un - um) % 2 != 0) return 0.0;
        return ((um - un) / 2) % 2 == 0 ? 1.0 : -1.0;
    }

    std::string label() const { return cls == SymmetryClass::symmetric ? "s" : "as"; }
};

// 3D circular-crack channel basis on the unit disk: e^{im phi} R_k(r) with
// R_k(r) = r^{|m|} (1-r^2)^{1/2} P_k^{(|m|,1/2)}(1-2r^2).  The order-|m|
// Hankel transform is closed form:
//   int_0^1 R_k(r) J_{|m|}(rho r) r dr
//     = sqrt(2) Gamma(k+3/2)/k! * J_{|m|+2k+3/2}(rho) / rho^{3/2}.
// Radial quadrature (Gauss-Jacobi in u = r^2) is the primary evaluation
// path; the closed form serves the far field and is cross-checked against
// the quadrature on an overlap window at construction.
class BasisSpec3D {
  public:
    // radial_order <= 0 picks a rule resolving the transform oscillations
    // up to the closed-form switch radius
    BasisSpec3D(int channel, int size, int radial_order = 0);

    int channel() const { return channel_; }
    int abs_m() const { return std::abs(channel_); }
    int size() const { return size_; }
    double bessel_order(int k) const { return abs_m() + 2 * k + 1.5; }
    double closed_form_coeff(int k) const { return coeff_[k]; }

    double radial_eval(int k, double r) const; // R_k(r)
    // Hankel transforms G_k(rho) for all k, by radial quadrature.
    void transforms_quadrature(double rho, double* out) const;
    // Same via the closed form (requires rho > 0).
    void transforms_closed(double rho, double* out) const;
    // Quadrature below the switch radius, closed form beyond.
    void transforms(double rho, double* out) const;
    double switch_rho() const { return switch_rho_; }
    double overlap_mismatch() const { return overlap_mismatch_; }

    std::string label() const { return "m=" + std::to_string(channel_); }

  private:
    int channel_, size_;
    GaussJacobi rule_;                   // weight (1-u)^{1/2} on [0,1]
    std::vector<double> wk_;             // size_ x nodes: 1/2 w_i u^{m/2} P_k
    std::vector<double> coeff_;          // sqrt(2) Gamma(k+3/2)/k!
    double switch_rho_ = 40.0;
    double overlap_mismatch_ = 0.0;
};

double jacobi_p(int k, double alpha, double beta, double x);

struct GalerkinBlock {
    int dim = 2;
    std::string label;
    double ell = 0.0;
    double omega = 0.0;
    int basis_size = 0;
    Eigen::MatrixXd Q;        // Q(ell, omega) Galerkin matrix
    Eigen::MatrixXd Q0;       // reference operator
    Eigen::MatrixXd M;        // L2(Gamma) mass
    Eigen::VectorXd rank_one; // coordinates of Phi_ell against the basis
};

struct Q0Options {
    double cutoff = 12000.0; // upper end of the numerical xi integral
    double panel = 1.0;
    int gl_order = 14;
    double monitor_tol = 1e-8; // entry drift between cutoff and 0.75*cutoff
    bool monitor = true;
};

struct QOptions {
    double xi_max = 32.0;     // symbol quadrature window (xi/ell units)
    double model_tol = 1e-6;  // admissible relative misfit of the tail model
    double base_panel = 0.25;
    int gl_order = 16;
    double spike_outer = 0.4; // graded refinement window around kappa
    double pair_cutoff = 3000.0; // numerical range of the tail pair integrals
};

// m_omega(s) - s decays only algebraically (~ -c1(omega)/s); beyond the
// quadrature window the residual form is integrated against the fitted model
// -(c1/s + c3/s^3 + c5/s^5) through omega-independent Bessel pair integrals,
// precomputed per (basis, ell).
struct ResidualTails {
    double z0 = 0.0;       // ell * xi_max
    Eigen::MatrixXd w1;    // weight of c1: int_{z0}^inf J J z^{-3} assembled
    Eigen::MatrixXd w3;    // weight of c3
    Eigen::MatrixXd w5;    // weight of c5
};
ResidualTails make_residual_tails(const BasisSpec2D& basis, double ell, const QOptions& opts = {});
ResidualTails make_residual_tails(const BasisSpec3D& basis, double ell, const QOptions& opts = {});

// int_T^inf J_a(t) J_b(t) t^{-p} dt from the product expansion (real orders).
double bessel_product_tail_p(double a, double b, double T, int p);

// Reference form q0[g,h] = int |xi| g^ conj(h^) dxi (2D) or the disk analogue
// reduced to the radial channel integral (3D).
Eigen::MatrixXd assemble_q0(const BasisSpec2D& basis, const Q0Options& opts = {});
Eigen::MatrixXd assemble_q0(const BasisSpec3D& basis, const Q0Options& opts = {});

// Rescaled truncated DtN form q(ell, omega) = Q0/ell + residual-symbol part.
// omega is carried in extended precision: the assembly resolves gaps
// Lambda - omega down to ~1e-15 against the long double threshold anchor.
Eigen::MatrixXd assemble_q(const BasisSpec2D& basis, double ell, long double omega,
                           const ThresholdData& thr, const QOptions& opts = {},
                           const Q0Options& q0opts = {});
Eigen::MatrixXd assemble_q(const BasisSpec3D& basis, double ell, long double omega,
                           const ThresholdData& thr, const QOptions& opts = {},
                           const Q0Options& q0opts = {});
// Same with precomputed Q0 block and tail pair integrals (the hot path
// under bisection).
Eigen::MatrixXd assemble_q_with_q0(const BasisSpec2D& basis, const Eigen::MatrixXd& q0,
                                   const ResidualTails& tails, double ell, long double omega,
                                   const ThresholdData& thr, const QOptions& opts = {});
Eigen::MatrixXd assemble_q_with_q0(const BasisSpec3D& basis, const Eigen::MatrixXd& q0,
                                   const ResidualTails& tails, double ell, long double omega,
                                   const ThresholdData& thr, const QOptions& opts = {});

// Static form q(ell, 0) assembled from m_0 (positivity checks in tests).
Eigen::MatrixXd assemble_q_static(const BasisSpec2D& basis, double ell,
                                  const Eigen::MatrixXd& q0, const QOptions& opts = {});

Eigen::MatrixXd mass_matrix(const BasisSpec2D& basis);
Eigen::MatrixXd mass_matrix(const BasisSpec3D& basis);

// L2(Gamma) coordinates of the oscillatory rank-one profile: cos(kappa ell x)
// (symmetric), sin(kappa ell x) (antisymmetric), e^{im phi} J_m(kappa ell r).
Eigen::VectorXd rank_one_vector(const BasisSpec2D& basis, double ell, const ThresholdData& thr);
Eigen::VectorXd rank_one_vector(const BasisSpec3D& basis, double ell, const ThresholdData& thr);

// Coordinates of the small-crack limit profiles Psi_ct = 1, Psi_id = x,
// Psi_m = r^{|m|} e^{im phi}.
Eigen::VectorXd coords_psi_ct(const BasisSpec2D& basis);
Eigen::VectorXd coords_psi_id(const BasisSpec2D& basis);
Eigen::VectorXd coords_psi_m(const BasisSpec3D& basis);

// <Q0^{-1} rhs, rhs> in the Galerkin frame.
double q0_inverse_pairing(const Eigen::MatrixXd& q0, const Eigen::VectorXd& rhs_coords);

// Pointwise evaluation of a coordinate vector in the 2D basis.
double reconstruct(const BasisSpec2D& basis, const Eigen::VectorXd& coords, double x);

// Bundle used by the spectral module and the CLI cache.
GalerkinBlock make_block(const BasisSpec2D& basis, double ell, long double omega,
                         const ThresholdData& thr, const QOptions& opts = {},
                         const Q0Options& q0opts = {});
GalerkinBlock make_block(const BasisSpec3D& basis, double ell, long double omega,
                         const ThresholdData& thr, const QOptions& opts = {},
                         const Q0Options& q0opts = {});

// Binary block cache keyed by (label, ell, omega, N); format-versioned.
struct BlockCache {
    std::string dir;
    std::optional<GalerkinBlock> load(const std::string& label, double ell, double omega,
                                      int n) const;
    void store(const GalerkinBlock& block) const;
    std::string key_path(const std::string& label, double ell, double omega, int n) const;
};

// Shared tail of int_T^inf J_a(t) J_b(t) / t dt from the two-term Hankel
// expansion of the product; valid for real orders.
double bessel_product_tail(double a, double b, double T);

} // namespace lambtrap
