#include "lambtrap/boundary_op.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "lambtrap/bessel.hpp"
#include "lambtrap/dtn.hpp"
#include "lambtrap/errors.hpp"

namespace lambtrap {

static constexpr double SQRT_PIH = 1.2533141373155003; // sqrt(pi/2)

double BasisSpec2D::eval(int j, double x) const {
    const int n = u_order(j);
    // U_n(cos t) = sin((n+1)t)/sin t; stable through the weighted form
    double s2 = 1.0 - x * x;
    if (s2 <= 0.0) return 0.0;
    double theta = std::acos(std::clamp(x, -1.0, 1.0));
    return std::sin((n + 1) * theta);
}

double BasisSpec2D::transform(int j, double xi) const {
    const int a = bessel_order(j);
    if (std::abs(xi) < 1e-10) return (a == 1) ? 0.5 * SQRT_PIH : 0.0;
    return SQRT_PIH * a * bessel_j(a, xi) / xi;
}

double jacobi_p(int k, double alpha, double beta, double x) {
    if (k == 0) return 1.0;
    double p0 = 1.0;
    double p1 = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
    for (int n = 2; n <= k; ++n) {
        const double ab = alpha + beta;
        const double a1 = 2.0 * n * (n + ab) * (2.0 * n + ab - 2.0);
        const double a2 = (2.0 * n + ab - 1.0) * (alpha * alpha - beta * beta);
        const double a3 = (2.0 * n + ab - 1.0) * (2.0 * n + ab) * (2.0 * n + ab - 2.0);
        const double a4 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * (2.0 * n + ab);
        const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

BasisSpec3D::BasisSpec3D(int channel, int size, int radial_order)
    : channel_(channel), size_(size) {
    const int m = abs_m();
    switch_rho_ = std::max(40.0, bessel_order(size_ - 1) + 12.0);
    if (radial_order <= 0)
        radial_order = std::max(64, (int)(0.7 * switch_rho_) + 16);
    rule_ = gauss_jacobi01(radial_order, 0.5, 0.0);
    wk_.resize(size_t(size_) * rule_.nodes.size());
    for (size_t i = 0; i < rule_.nodes.size(); ++i) {
        const double u = rule_.nodes[i];
        const double base = 0.5 * rule_.weights[i] * std::pow(u, 0.5 * m);
        for (int k = 0; k < size_; ++k)
            wk_[size_t(k) * rule_.nodes.size() + i] = base * jacobi_p(k, m, 0.5, 1.0 - 2.0 * u);
    }
    coeff_.resize(size_);
    for (int k = 0; k < size_; ++k)
        coeff_[k] = std::sqrt(2.0) * std::exp(std::lgamma(k + 1.5) - std::lgamma(k + 1.0));

    // Closed form vs quadrature on an overlap window.  The closed form takes
    // over beyond switch_rho_, so the two routes must agree there.
    std::vector<double> gq(size_), gc(size_);
    for (double rho : {0.7 * switch_rho_, 0.85 * switch_rho_, switch_rho_}) {
        transforms_quadrature(rho, gq.data());
        transforms_closed(rho, gc.data());
        for (int k = 0; k < size_; ++k)
            overlap_mismatch_ = std::max(overlap_mismatch_, std::abs(gq[k] - gc[k]));
    }
    if (overlap_mismatch_ > 1e-10)
        throw QuadratureFailure("BasisSpec3D: Hankel quadrature and closed form disagree");
}

double BasisSpec3D::radial_eval(int k, double r) const {
    const int m = abs_m();
    return std::pow(r, m) * std::sqrt(std::max(0.0, 1.0 - r * r)) *
           jacobi_p(k, m, 0.5, 1.0 - 2.0 * r * r);
}

void BasisSpec3D::transforms_quadrature(double rho, double* out) const {
    const int m = abs_m();
    const size_t nn = rule_.nodes.size();
    std::vector<double> jm(nn);
    std::vector<double> buf(m + 1);
    for (size_t i = 0; i < nn; ++i) {
        bessel_j_all(m, rho * std::sqrt(rule_.nodes[i]), buf.data());
        jm[i] = buf[m];
    }
    for (int k = 0; k < size_; ++k) {
        double s = 0.0;
        const double* w = &wk_[size_t(k) * nn];
        for (size_t i = 0; i < nn; ++i) s += w[i] * jm[i];
        out[k] = s;
    }
}

void BasisSpec3D::transforms_closed(double rho, double* out) const {
    const int m = abs_m();
    const int kmax = m + 2 * (size_ - 1) + 1; // index of J_{m+2k+3/2} in half-order array
    std::vector<double> jh(kmax + 1);
    bessel_j_half_all(kmax, rho, jh.data());
    const double r32 = std::pow(rho, 1.5);
    for (int k = 0; k < size_; ++k) out[k] = coeff_[k] * jh[m + 2 * k + 1] / r32;
}

void BasisSpec3D::transforms(double rho, double* out) const {
    if (rho <= switch_rho_)
        transforms_quadrature(rho, out);
    else
        transforms_closed(rho, out);
}

double bessel_product_tail_p(double a, double b, double T, int p) {
    // Hankel expansion J_nu = sqrt(2/(pi t)) [P cos(chi) - Q sin(chi)] with
    // P = 1 - a2/t^2 + a4/t^4, Q = a1/t - a3/t^3, a_k(nu) the standard
    // coefficients.  Product split into the smooth part
    //   (cos(D)(P_a P_b + Q_a Q_b) + sin(D)(P_a Q_b - Q_a P_b)) / (pi t)
    // and the 2t-oscillation, each divided by t^p and integrated term by
    // term over (T, inf).  The cross coefficients grow like a2(a) a2(b) for
    // widely separated orders, so the t^-4 terms are not optional.
    auto coeffs = [](double nu, double* c) {
        const double mu = 4.0 * nu * nu;
        c[1] = (mu - 1.0) / 8.0;
        c[2] = (mu - 1.0) * (mu - 9.0) / 128.0;
        c[3] = (mu - 1.0) * (mu - 9.0) * (mu - 25.0) / 3072.0;
        c[4] = (mu - 1.0) * (mu - 9.0) * (mu - 25.0) * (mu - 49.0) / 98304.0;
        c[5] = c[4] * (mu - 81.0) / 40.0;
        c[6] = c[5] * (mu - 121.0) / 48.0;
    };
    double ca[7], cb[7];
    coeffs(a, ca);
    coeffs(b, cb);
    const double c2 = ca[1] * cb[1] - ca[2] - cb[2];
    const double c4 = ca[4] + cb[4] + ca[2] * cb[2] - ca[1] * cb[3] - ca[3] * cb[1];
    const double c6 = -(ca[6] + cb[6]) - ca[2] * cb[4] - ca[4] * cb[2] + ca[1] * cb[5] +
                      ca[5] * cb[1] + ca[3] * cb[3];
    const double s1 = cb[1] - ca[1];
    const double s3 = ca[3] - cb[3] + ca[1] * cb[2] - ca[2] * cb[1];
    const double s5 = cb[5] - ca[5] + ca[2] * cb[3] - ca[3] * cb[2] + ca[4] * cb[1] -
                      ca[1] * cb[4];
    const double d2 = -(ca[2] + cb[2]) - ca[1] * cb[1];
    const double d4 = ca[4] + cb[4] + ca[2] * cb[2] + ca[1] * cb[3] + ca[3] * cb[1];
    const double d6 = -(ca[6] + cb[6]) - ca[2] * cb[4] - ca[4] * cb[2] - ca[1] * cb[5] -
                      ca[5] * cb[1] - ca[3] * cb[3];
    const double e1 = ca[1] + cb[1];
    const double e3 = -(ca[3] + cb[3] + ca[2] * cb[1] + ca[1] * cb[2]);
    const double e5 = ca[5] + cb[5] + ca[2] * cb[3] + ca[3] * cb[2] + ca[4] * cb[1] +
                      ca[1] * cb[4];
    const double delta = 0.5 * M_PI * (a - b);
    const double sigma = 0.5 * M_PI * (a + b) + 0.5 * M_PI;
    const double sn = std::sin(2.0 * T - sigma), cs = std::cos(2.0 * T - sigma);
    auto ipow = [T](int q) { return std::pow(T, -q); };
    // int_T^inf cos(2t - sigma) t^-q dt and the sine variant, two IBP orders
    auto osc_cos = [&](int q) { return -sn * ipow(q) / 2.0 + q * cs * ipow(q + 1) / 4.0; };
    auto osc_sin = [&](int q) { return cs * ipow(q) / 2.0 + q * sn * ipow(q + 1) / 4.0; };
    const double smooth =
        std::cos(delta) * (ipow(p) / p + c2 * ipow(p + 2) / (p + 2) + c4 * ipow(p + 4) / (p + 4) +
                           c6 * ipow(p + 6) / (p + 6)) +
        std::sin(delta) * (s1 * ipow(p + 1) / (p + 1) + s3 * ipow(p + 3) / (p + 3) +
                           s5 * ipow(p + 5) / (p + 5));
    const double osc = osc_cos(p + 1) + d2 * osc_cos(p + 3) + d4 * osc_cos(p + 5) +
                       d6 * osc_cos(p + 7) - e1 * osc_sin(p + 2) - e3 * osc_sin(p + 4) -
                       e5 * osc_sin(p + 6);
    return (smooth + osc) / M_PI;
}

double bessel_product_tail(double a, double b, double T) {
    return bessel_product_tail_p(a, b, T, 1);
}

namespace {

// int_0^T J_a J_b / t for all same-class pairs, shared Bessel vector per node.
// Also records the partial sums at 0.625 T for the cutoff monitor.
struct PairIntegrals {
    Eigen::MatrixXd at_cutoff;
    Eigen::MatrixXd at_probe;
    double probe_T = 0.0;
};

PairIntegrals integrate_pairs_2d(const std::vector<int>& orders, const Q0Options& opts) {
    const int n = (int)orders.size();
    const int amax = orders.back();
    PairIntegrals r;
    r.at_cutoff = Eigen::MatrixXd::Zero(n, n);
    r.at_probe = Eigen::MatrixXd::Zero(n, n);
    r.probe_T = 0.75 * opts.cutoff;
    const auto& gl = gauss_legendre(opts.gl_order);
    std::vector<double> jbuf(amax + 1);
    const int panels = (int)std::ceil(opts.cutoff / opts.panel);
    bool probe_taken = false;
    for (int p = 0; p < panels; ++p) {
        const double a = opts.cutoff * p / panels, b = opts.cutoff * (p + 1) / panels;
        if (!probe_taken && a >= r.probe_T) {
            r.at_probe = r.at_cutoff;
            r.probe_T = a;
            probe_taken = true;
        }
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < opts.gl_order; ++q) {
            const double t = mid + half * gl.nodes[q];
            if (t <= 0.0) continue;
            const double w = gl.weights[q] * half / t;
            bessel_j_all(amax, t, jbuf.data());
            for (int i = 0; i < n; ++i) {
                const double ji = jbuf[orders[i]] * w;
                for (int j = i; j < n; ++j) r.at_cutoff(i, j) += ji * jbuf[orders[j]];
            }
        }
    }
    return r;
}

} // namespace

Eigen::MatrixXd assemble_q0(const BasisSpec2D& basis, const Q0Options& opts) {
    std::vector<int> orders(basis.size);
    for (int j = 0; j < basis.size; ++j) orders[j] = basis.bessel_order(j);
    PairIntegrals pi = integrate_pairs_2d(orders, opts);
    const int n = basis.size;
    Eigen::MatrixXd Q(n, n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double a = orders[i], b = orders[j];
            const double I_full = pi.at_cutoff(i, j) + bessel_product_tail(a, b, opts.cutoff);
            const double pref =
                M_PI * a * b * BasisSpec2D::pair_sign_orders(basis.u_order(i), basis.u_order(j));
            Q(i, j) = pref * I_full;
            Q(j, i) = Q(i, j);
            if (opts.monitor) {
                const double I_probe = pi.at_probe(i, j) + bessel_product_tail(a, b, pi.probe_T);
                // the product expansion converges like (nu^2/T^2)^k, so the
                // admissible drift grows with the pair's orders
                const double scale = std::pow(std::max(1.0, std::max(a, b) / 33.0), 6.0);
                worst = std::max(worst, std::abs(pref) * std::abs(I_full - I_probe) / scale);
            }
        }
    }
    if (opts.monitor && worst > opts.monitor_tol)
        throw QuadratureFailure("assemble_q0(2D): cutoff monitor above tolerance");
    return Q;
}

Eigen::MatrixXd assemble_q0(const BasisSpec3D& basis, const Q0Options& opts) {
    const int n = basis.size();
    Eigen::MatrixXd I = Eigen::MatrixXd::Zero(n, n), Iprobe = Eigen::MatrixXd::Zero(n, n);
    const double probe_target = 0.75 * opts.cutoff;
    double probe_T = probe_target;
    const auto& gl = gauss_legendre(opts.gl_order);
    std::vector<double> g(n);
    const int panels = (int)std::ceil(opts.cutoff / opts.panel);
    bool probe_taken = false;
    // integrand: rho^2 G_i(rho) G_j(rho); equals c_i c_j J_{a_i} J_{a_j} / rho
    // once the closed form applies.
    for (int p = 0; p < panels; ++p) {
        const double a = opts.cutoff * p / panels, b = opts.cutoff * (p + 1) / panels;
        if (!probe_taken && a >= probe_target) {
            Iprobe = I;
            probe_T = a;
            probe_taken = true;
        }
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < opts.gl_order; ++q) {
            const double rho = mid + half * gl.nodes[q];
            if (rho <= 0.0) continue;
            basis.transforms(rho, g.data());
            const double w = gl.weights[q] * half * rho * rho;
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) I(i, j) += w * g[i] * g[j];
        }
    }
    Eigen::MatrixXd Q(n, n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double ai = basis.bessel_order(i), aj = basis.bessel_order(j);
            const double cc = basis.closed_form_coeff(i) * basis.closed_form_coeff(j);
            const double full = I(i, j) + cc * bessel_product_tail(ai, aj, opts.cutoff);
            Q(i, j) = 2.0 * M_PI * full;
            Q(j, i) = Q(i, j);
            if (opts.monitor) {
                const double probe = Iprobe(i, j) + cc * bessel_product_tail(ai, aj, probe_T);
                const double scale =
                    std::pow(std::max(1.0, std::max(ai, aj) / 33.0), 6.0);
                worst = std::max(worst, 2.0 * M_PI * std::abs(full - probe) / scale);
            }
        }
    }
    if (opts.monitor && worst > opts.monitor_tol)
        throw QuadratureFailure("assemble_q0(3D): cutoff monitor above tolerance");
    return Q;
}

namespace {

std::vector<double> residual_breakpoints(double xi_max, const ThresholdData* thr,
                                         long double omega, const QOptions& opts) {
    auto pts = uniform_breakpoints(0.0, xi_max, opts.base_panel);
    if (thr) {
        const long double gap = thr->lambda_precise - omega;
        const double w =
            std::sqrt(std::max(2.0 * (double)gap / thr->zeta1_pp, 1e-300));
        refine_around(pts, thr->kappa, opts.spike_outer, std::max(w / 4.0, 1e-13), 0.0, xi_max);
    }
    return pts;
}

// Residual-symbol quadrature on [0, xi_max], shared by the 2D and 3D paths.
template <typename TransformsFn>
Eigen::MatrixXd assemble_residual_window(int n, TransformsFn&& transforms, double ell,
                                         const std::function<double(double)>& symbol_residual,
                                         const ThresholdData* thr, long double omega,
                                         const QOptions& opts, double measure_power) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    const auto& gl = gauss_legendre(opts.gl_order);
    std::vector<double> t(n);
    auto pts = residual_breakpoints(opts.xi_max, thr, omega, opts);
    for (size_t p = 0; p + 1 < pts.size(); ++p) {
        const double mid = 0.5 * (pts[p] + pts[p + 1]);
        const double half = 0.5 * (pts[p + 1] - pts[p]);
        for (int q = 0; q < opts.gl_order; ++q) {
            const double s = mid + half * gl.nodes[q];
            if (s <= 0.0) continue;
            const double r = symbol_residual(s);
            transforms(ell * s, t.data());
            const double w = gl.weights[q] * half * r * std::pow(s, measure_power);
            for (int i = 0; i < n; ++i) {
                const double ti = t[i] * w;
                for (int j = i; j < n; ++j) R(i, j) += ti * t[j];
            }
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) R(j, i) = R(i, j);
    return R;
}

// -(c1/s + c3/s^3 + c5/s^5) model of the residual symbol beyond the window.
struct TailModel {
    double c1 = 0.0, c3 = 0.0, c5 = 0.0;
};

TailModel fit_tail_model(const std::function<double(double)>& r, double s0, double model_tol) {
    const double s1 = 1.15 * s0, s2 = 1.9 * s0, s3 = 3.2 * s0;
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    int row = 0;
    for (double s : {s1, s2, s3}) {
        A(row, 0) = 1.0;
        A(row, 1) = 1.0 / (s * s);
        A(row, 2) = 1.0 / (s * s * s * s);
        b(row) = -r(s) * s;
        ++row;
    }
    const Eigen::Vector3d c = A.partialPivLu().solve(b);
    TailModel m{c(0), c(1), c(2)};
    const double sp = 4.6 * s0;
    const double pred = -(m.c1 / sp + m.c3 / (sp * sp * sp) + m.c5 / std::pow(sp, 5));
    const double have = r(sp);
    if (std::abs(pred - have) > model_tol * std::abs(have) + 1e-14)
        throw QuadratureFailure("assemble_q: residual symbol tail model misfit");
    return m;
}

// int_{z0}^inf J_{a_i} J_{a_j} z^{-q} dz for all pairs; J values supplied by
// jfill (integer or half-integer orders).
template <typename JFill>
Eigen::MatrixXd pair_integrals_zq(int n, JFill&& jfill, double z0, int q,
                                  const std::vector<double>& orders, double Z, int gl_order) {
    Eigen::MatrixXd I = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> pts{z0};
    while (pts.back() < std::min(6.0 * z0 + 4.0, Z)) pts.push_back(std::min(pts.back() * 1.3, Z));
    if (pts.back() < Z) {
        auto tailpts = uniform_breakpoints(pts.back(), Z, 1.0);
        pts.insert(pts.end(), tailpts.begin() + 1, tailpts.end());
    }
    const auto& gl = gauss_legendre(gl_order);
    std::vector<double> jv(n);
    for (size_t p = 0; p + 1 < pts.size(); ++p) {
        const double mid = 0.5 * (pts[p] + pts[p + 1]), half = 0.5 * (pts[p + 1] - pts[p]);
        for (int k = 0; k < gl_order; ++k) {
            const double t = mid + half * gl.nodes[k];
            jfill(t, jv.data());
            const double w = gl.weights[k] * half * std::pow(t, -q);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) I(i, j) += w * jv[i] * jv[j];
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            I(i, j) += bessel_product_tail_p(orders[i], orders[j], Z, q);
            I(j, i) = I(i, j);
        }
    return I;
}

} // namespace

ResidualTails make_residual_tails(const BasisSpec2D& basis, double ell, const QOptions& opts) {
    const int n = basis.size;
    std::vector<double> orders(n);
    for (int j = 0; j < n; ++j) orders[j] = basis.bessel_order(j);
    const int amax = basis.max_bessel_order();
    std::vector<double> buf(amax + 1);
    auto jfill = [&](double z, double* out) {
        bessel_j_all(amax, z, buf.data());
        for (int j = 0; j < n; ++j) out[j] = buf[(int)orders[j]];
    };
    ResidualTails rt;
    rt.z0 = ell * opts.xi_max;
    // t_i(z) t_j(z) = (pi/2) a_i a_j J_i J_j / z^2 and s^{-p} ds = ell^{p-1} z^{-p} dz
    auto weights = [&](int q, double lp) {
        Eigen::MatrixXd I =
            pair_integrals_zq(n, jfill, rt.z0, q, orders, opts.pair_cutoff, opts.gl_order);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                I(i, j) *= 0.5 * M_PI * orders[i] * orders[j] * lp;
        return I;
    };
    rt.w1 = weights(3, 1.0);
    rt.w3 = weights(5, ell * ell);
    rt.w5 = weights(7, std::pow(ell, 4));
    return rt;
}

ResidualTails make_residual_tails(const BasisSpec3D& basis, double ell, const QOptions& opts) {
    const int n = basis.size();
    std::vector<double> orders(n);
    for (int k = 0; k < n; ++k) orders[k] = basis.bessel_order(k);
    const int kmax = basis.abs_m() + 2 * (n - 1) + 1;
    std::vector<double> buf(kmax + 1);
    auto jfill = [&](double z, double* out) {
        bessel_j_half_all(kmax, z, buf.data());
        for (int k = 0; k < n; ++k) out[k] = buf[basis.abs_m() + 2 * k + 1];
    };
    ResidualTails rt;
    rt.z0 = ell * opts.xi_max;
    // G_i(z) G_j(z) s ds = c_i c_j J_i J_j / z^3 * (z/ell)^{1-p} ... dz/ell
    auto weights = [&](int q, double lp) {
        Eigen::MatrixXd I =
            pair_integrals_zq(n, jfill, rt.z0, q, orders, opts.pair_cutoff, opts.gl_order);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                I(i, j) *= basis.closed_form_coeff(i) * basis.closed_form_coeff(j) * lp;
        return I;
    };
    rt.w1 = weights(3, 1.0 / ell);
    rt.w3 = weights(5, ell);
    rt.w5 = weights(7, ell * ell * ell);
    return rt;
}

Eigen::MatrixXd assemble_q_with_q0(const BasisSpec2D& basis, const Eigen::MatrixXd& q0,
                                   const ResidualTails& tails, double ell, long double omega,
                                   const ThresholdData& thr, const QOptions& opts) {
    const int n = basis.size;
    auto transforms = [&basis](double xi, double* out) {
        for (int j = 0; j < basis.size; ++j) out[j] = basis.transform(j, xi);
    };
    auto sym = [omega](double s) { return dtn_symbol_real(s, omega) - s; };
    Eigen::MatrixXd R =
        assemble_residual_window(n, transforms, ell, sym, &thr, omega, opts, 0.0);
    const TailModel tm = fit_tail_model(sym, opts.xi_max, opts.model_tol);
    R -= tm.c1 * tails.w1 + tm.c3 * tails.w3 + tm.c5 * tails.w5;
    Eigen::MatrixXd Q = q0 / ell;
    // signs and the factor 2 from the even reduction of the line integral
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            Q(i, j) += 2.0 * ell *
                       BasisSpec2D::pair_sign_orders(basis.u_order(i), basis.u_order(j)) * R(i, j);
    return Q;
}

Eigen::MatrixXd assemble_q(const BasisSpec2D& basis, double ell, long double omega,
                           const ThresholdData& thr, const QOptions& opts,
                           const Q0Options& q0opts) {
    return assemble_q_with_q0(basis, assemble_q0(basis, q0opts),
                              make_residual_tails(basis, ell, opts), ell, omega, thr, opts);
}

Eigen::MatrixXd assemble_q_with_q0(const BasisSpec3D& basis, const Eigen::MatrixXd& q0,
                                   const ResidualTails& tails, double ell, long double omega,
                                   const ThresholdData& thr, const QOptions& opts) {
    const int n = basis.size();
    auto transforms = [&basis](double rho, double* out) {
        basis.transforms(std::max(rho, 1e-12), out);
    };
    auto sym = [omega](double s) { return dtn_symbol_real(s, omega) - s; };
    Eigen::MatrixXd R =
        assemble_residual_window(n, transforms, ell, sym, &thr, omega, opts, 1.0);
    const TailModel tm = fit_tail_model(sym, opts.xi_max, opts.model_tol);
    R -= tm.c1 * tails.w1 + tm.c3 * tails.w3 + tm.c5 * tails.w5;
    // q = Q0/ell + 2 pi ell^2 int r_omega(s) G(ell s) G(ell s) s ds
    return q0 / ell + 2.0 * M_PI * ell * ell * R;
}

Eigen::MatrixXd assemble_q(const BasisSpec3D& basis, double ell, long double omega,
                           const ThresholdData& thr, const QOptions& opts,
                           const Q0Options& q0opts) {
    return assemble_q_with_q0(basis, assemble_q0(basis, q0opts),
                              make_residual_tails(basis, ell, opts), ell, omega, thr, opts);
}

Eigen::MatrixXd assemble_q_static(const BasisSpec2D& basis, double ell,
                                  const Eigen::MatrixXd& q0, const QOptions& opts) {
    const int n = basis.size;
    auto transforms = [&basis](double xi, double* out) {
        for (int j = 0; j < basis.size; ++j) out[j] = basis.transform(j, xi);
    };
    auto sym = [](double s) { return dtn_symbol_static(s) - s; };
    // m_0 approaches |xi| exponentially; the window alone suffices here
    Eigen::MatrixXd R = assemble_residual_window(n, transforms, ell, sym, nullptr, 0.0L, opts, 0.0);
    Eigen::MatrixXd Q = q0 / ell;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            Q(i, j) += 2.0 * ell *
                       BasisSpec2D::pair_sign_orders(basis.u_order(i), basis.u_order(j)) * R(i, j);
    return Q;
}

Eigen::MatrixXd mass_matrix(const BasisSpec2D& basis) {
    // int U_n U_m (1-x^2) dx = 1/2 [c(a-b) - c(a+b)], a = n+1, b = m+1,
    // c(k) = 2/(1-k^2) for even k, 0 for odd (exact trig integral).
    auto c = [](int k) {
        if (k % 2 != 0) return 0.0;
        return 2.0 / (1.0 - double(k) * double(k));
    };
    const int n = basis.size;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int a = basis.u_order(i) + 1, b = basis.u_order(j) + 1;
            M(i, j) = 0.5 * (c(a - b) - c(a + b));
        }
    }
    return M;
}

Eigen::MatrixXd mass_matrix(const BasisSpec3D& basis) {
    const int n = basis.size();
    const int m = basis.abs_m();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    const auto& gl = gauss_legendre(96);
    std::vector<double> p(n);
    for (int q = 0; q < 96; ++q) {
        const double u = 0.5 * (gl.nodes[q] + 1.0);
        const double w = 0.5 * gl.weights[q] * std::pow(u, m) * (1.0 - u);
        for (int k = 0; k < n; ++k) p[k] = jacobi_p(k, m, 0.5, 1.0 - 2.0 * u);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) M(i, j) += w * p[i] * p[j];
    }
    M *= M_PI; // 2 pi * 1/2 from u = r^2
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) M(j, i) = M(i, j);
    return M;
}

Eigen::VectorXd rank_one_vector(const BasisSpec2D& basis, double ell, const ThresholdData& thr) {
    // In the Chebyshev angle x = cos(theta) the integrand is smooth:
    // int_0^pi Phi(cos t) sin((n+1) t) sin(t) dt.
    const int n = basis.size;
    const int order = std::max(96, 3 * basis.max_bessel_order() + 16);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    const auto& gl = gauss_legendre(order);
    const double kl = thr.kappa * ell;
    const bool sym = basis.cls == SymmetryClass::symmetric;
    for (int q = 0; q < order; ++q) {
        const double t = 0.5 * M_PI * (gl.nodes[q] + 1.0);
        const double w = 0.5 * M_PI * gl.weights[q] * std::sin(t);
        const double x = std::cos(t);
        const double phi = sym ? std::cos(kl * x) : std::sin(kl * x);
        for (int j = 0; j < n; ++j)
            v(j) += w * phi * std::sin((basis.u_order(j) + 1) * t);
    }
    return v;
}

Eigen::VectorXd rank_one_vector(const BasisSpec3D& basis, double ell, const ThresholdData& thr) {
    const int n = basis.size();
    Eigen::VectorXd v(n);
    std::vector<double> g(n);
    const double rho = thr.kappa * ell;
    basis.transforms_quadrature(rho, g.data());
    const double sign = (basis.channel() < 0 && basis.abs_m() % 2 == 1) ? -1.0 : 1.0;
    for (int k = 0; k < n; ++k) v(k) = sign * 2.0 * M_PI * g[k];
    return v;
}

Eigen::VectorXd coords_psi_ct(const BasisSpec2D& basis) {
    // <1, phi_n> = (pi/2) delta_{n,0}
    const int n = basis.size;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j)
        if (basis.u_order(j) == 0) v(j) = 0.5 * M_PI;
    return v;
}

Eigen::VectorXd coords_psi_id(const BasisSpec2D& basis) {
    // <x, phi_n> = (pi/4) delta_{n,1}
    const int n = basis.size;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j)
        if (basis.u_order(j) == 1) v(j) = 0.25 * M_PI;
    return v;
}

Eigen::VectorXd coords_psi_m(const BasisSpec3D& basis) {
    // <Psi_m, g_k> = 2 pi int_0^1 r^{|m|} R_k(r) r dr = pi int u^m (1-u)^(1/2) P_k du
    const int n = basis.size();
    const int m = basis.abs_m();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    GaussJacobi gj = gauss_jacobi01(96, 0.5, 0.0);
    for (size_t i = 0; i < gj.nodes.size(); ++i) {
        const double u = gj.nodes[i];
        const double w = M_PI * gj.weights[i] * std::pow(u, m);
        for (int k = 0; k < n; ++k) v(k) += w * jacobi_p(k, m, 0.5, 1.0 - 2.0 * u);
    }
    return v;
}

double q0_inverse_pairing(const Eigen::MatrixXd& q0, const Eigen::VectorXd& rhs) {
    return rhs.dot(q0.ldlt().solve(rhs));
}

double reconstruct(const BasisSpec2D& basis, const Eigen::VectorXd& coords, double x) {
    double s = 0.0;
    for (int j = 0; j < basis.size; ++j) s += coords(j) * basis.eval(j, x);
    return s;
}

GalerkinBlock make_block(const BasisSpec2D& basis, double ell, long double omega,
                         const ThresholdData& thr, const QOptions& opts,
                         const Q0Options& q0opts) {
    GalerkinBlock b;
    b.dim = 2;
    b.label = basis.label();
    b.ell = ell;
    b.omega = (double)omega;
    b.basis_size = basis.size;
    b.Q0 = assemble_q0(basis, q0opts);
    b.Q = assemble_q_with_q0(basis, b.Q0, make_residual_tails(basis, ell, opts), ell, omega, thr,
                             opts);
    b.M = mass_matrix(basis);
    b.rank_one = rank_one_vector(basis, ell, thr);
    return b;
}

GalerkinBlock make_block(const BasisSpec3D& basis, double ell, long double omega,
                         const ThresholdData& thr, const QOptions& opts,
                         const Q0Options& q0opts) {
    GalerkinBlock b;
    b.dim = 3;
    b.label = basis.label();
    b.ell = ell;
    b.omega = (double)omega;
    b.basis_size = basis.size();
    b.Q0 = assemble_q0(basis, q0opts);
    b.Q = assemble_q_with_q0(basis, b.Q0, make_residual_tails(basis, ell, opts), ell, omega, thr,
                             opts);
    b.M = mass_matrix(basis);
    b.rank_one = rank_one_vector(basis, ell, thr);
    return b;
}

// ---- binary cache ----

static constexpr char kCacheMagic[4] = {'L', 'T', 'Q', 'B'};
static constexpr uint32_t kCacheVersion = 1;

std::string BlockCache::key_path(const std::string& label, double ell, double omega,
                                 int n) const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "block_%s_%.17g_%.17g_%d_v%u.bin", label.c_str(), ell, omega,
                  n, kCacheVersion);
    std::string name(buf);
    for (auto& c : name)
        if (c == '=' || c == '+') c = '_';
    return (std::filesystem::path(dir) / name).string();
}

static void write_matrix(std::ofstream& os, const Eigen::MatrixXd& m) {
    const uint64_t r = m.rows(), c = m.cols();
    os.write(reinterpret_cast<const char*>(&r), 8);
    os.write(reinterpret_cast<const char*>(&c), 8);
    os.write(reinterpret_cast<const char*>(m.data()), sizeof(double) * r * c);
}

static Eigen::MatrixXd read_matrix(std::ifstream& is) {
    uint64_t r = 0, c = 0;
    is.read(reinterpret_cast<char*>(&r), 8);
    is.read(reinterpret_cast<char*>(&c), 8);
    Eigen::MatrixXd m(r, c);
    is.read(reinterpret_cast<char*>(m.data()), sizeof(double) * r * c);
    return m;
}

void BlockCache::store(const GalerkinBlock& b) const {
    std::filesystem::create_directories(dir);
    std::ofstream os(key_path(b.label, b.ell, b.omega, b.basis_size), std::ios::binary);
    os.write(kCacheMagic, 4);
    os.write(reinterpret_cast<const char*>(&kCacheVersion), 4);
    const uint32_t dim = b.dim, n = b.basis_size, llen = (uint32_t)b.label.size();
    os.write(reinterpret_cast<const char*>(&dim), 4);
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&llen), 4);
    os.write(b.label.data(), llen);
    os.write(reinterpret_cast<const char*>(&b.ell), 8);
    os.write(reinterpret_cast<const char*>(&b.omega), 8);
    write_matrix(os, b.Q);
    write_matrix(os, b.Q0);
    write_matrix(os, b.M);
    Eigen::MatrixXd v = b.rank_one;
    write_matrix(os, v);
}

std::optional<GalerkinBlock> BlockCache::load(const std::string& label, double ell, double omega,
                                              int n) const {
    std::ifstream is(key_path(label, ell, omega, n), std::ios::binary);
    if (!is) return std::nullopt;
    char magic[4];
    uint32_t version = 0;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&version), 4);
    if (std::memcmp(magic, kCacheMagic, 4) != 0 || version != kCacheVersion) return std::nullopt;
    GalerkinBlock b;
    uint32_t dim = 0, nn = 0, llen = 0;
    is.read(reinterpret_cast<char*>(&dim), 4);
    is.read(reinterpret_cast<char*>(&nn), 4);
    is.read(reinterpret_cast<char*>(&llen), 4);
    b.label.resize(llen);
    is.read(b.label.data(), llen);
    is.read(reinterpret_cast<char*>(&b.ell), 8);
    is.read(reinterpret_cast<char*>(&b.omega), 8);
    b.dim = dim;
    b.basis_size = nn;
    b.Q = read_matrix(is);
    b.Q0 = read_matrix(is);
    b.M = read_matrix(is);
    Eigen::MatrixXd v = read_matrix(is);
    b.rank_one = v.col(0);
    if (!is) return std::nullopt;
    return b;
}

} // namespace lambtrap
