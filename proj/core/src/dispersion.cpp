#include "lambtrap/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lambtrap/errors.hpp"
#include "lambtrap/quadrature.hpp"
#include "lambtrap/rootfind.hpp"

namespace lambtrap {

using cd = std::complex<double>;

static constexpr double PIH = 1.5707963267948966;
static constexpr long double PIH_L = 1.57079632679489661923132169163975144L;
static constexpr double SERIES_RADIUS = 1e-2;

std::complex<double> branch_sqrt(cd z) {
    if (z.imag() == 0.0 && z.real() < 0.0) return cd(0.0, std::sqrt(-z.real()));
    return std::sqrt(z);
}

namespace entire {

// S(w) = sum_k (-1)^k (pi/2)^(2k+1) w^k / (2k+1)!
cd S(cd w) {
    if (std::abs(w) < SERIES_RADIUS) {
        cd term = PIH, acc = PIH;
        for (int k = 1; k <= 10; ++k) {
            term *= -w * (PIH * PIH) / double((2 * k) * (2 * k + 1));
            acc += term;
        }
        return acc;
    }
    cd r = std::sqrt(w); // any branch: S is even in r
    return std::sin(r * PIH) / r;
}

cd C(cd w) {
    if (std::abs(w) < SERIES_RADIUS) {
        cd term = 1.0, acc = 1.0;
        for (int k = 1; k <= 10; ++k) {
            term *= -w * (PIH * PIH) / double((2 * k - 1) * (2 * k));
            acc += term;
        }
        return acc;
    }
    cd r = std::sqrt(w);
    return std::cos(r * PIH);
}

cd dS(cd w) {
    if (std::abs(w) < SERIES_RADIUS) {
        // sum_{k>=1} (-1)^k (pi/2)^(2k+1) k w^(k-1) / (2k+1)!
        cd acc = 0.0;
        cd pref = -PIH * PIH * PIH / 6.0; // k=1 term
        cd wp = 1.0;
        for (int k = 1; k <= 10; ++k) {
            acc += pref * double(k) * wp;
            wp *= w;
            pref *= -(PIH * PIH) / double((2 * k + 2) * (2 * k + 3));
        }
        return acc;
    }
    return (PIH * C(w) - S(w)) / (2.0 * w);
}

long double S_ld(long double w) {
    if (std::abs(w) < (long double)SERIES_RADIUS) {
        long double term = PIH_L, acc = PIH_L;
        for (int k = 1; k <= 11; ++k) {
            term *= -w * (PIH_L * PIH_L) / (long double)((2 * k) * (2 * k + 1));
            acc += term;
        }
        return acc;
    }
    long double r = std::sqrt(std::abs(w));
    if (w > 0) return std::sin(r * PIH_L) / r;
    return std::sinh(r * PIH_L) / r;
}

long double C_ld(long double w) {
    if (std::abs(w) < (long double)SERIES_RADIUS) {
        long double term = 1.0L, acc = 1.0L;
        for (int k = 1; k <= 11; ++k) {
            term *= -w * (PIH_L * PIH_L) / (long double)((2 * k - 1) * (2 * k));
            acc += term;
        }
        return acc;
    }
    long double r = std::sqrt(std::abs(w));
    if (w > 0) return std::cos(r * PIH_L);
    return std::cosh(r * PIH_L);
}

} // namespace entire

static void check_finite(cd z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NumericalError(std::string("non-finite input: ") + what);
}

cd rayleigh_lamb(cd xi, cd omega) {
    check_finite(xi, "xi");
    check_finite(omega, "omega");
    cd x = xi * xi;
    cd b = omega - x;
    cd g = 0.5 * omega - x;
    return entire::S(b) * entire::C(g) * g + entire::C(b) * entire::S(g) * x;
}

cd rayleigh_lamb_dxi(cd xi, cd omega) {
    cd x = xi * xi;
    cd b = omega - x;
    cd g = 0.5 * omega - x;
    const cd Sb = entire::S(b), Cb = entire::C(b);
    const cd Sg = entire::S(g), Cg = entire::C(g);
    const cd dSb = entire::dS(b), dSg = entire::dS(g);
    const cd dCb = -0.25 * M_PI * Sb, dCg = -0.25 * M_PI * Sg;
    // d/dx [S(b)C(g)g + C(b)S(g)x] with db/dx = dg/dx = -1
    cd dPsi_dx = -dSb * Cg * g - Sb * dCg * g - Sb * Cg - dCb * Sg * x - Cb * dSg * x + Cb * Sg;
    return 2.0 * xi * dPsi_dx;
}

cd rayleigh_lamb_domega(cd xi, cd omega) {
    cd x = xi * xi;
    cd b = omega - x;
    cd g = 0.5 * omega - x;
    const cd Sb = entire::S(b), Cb = entire::C(b);
    const cd Sg = entire::S(g), Cg = entire::C(g);
    const cd dSb = entire::dS(b), dSg = entire::dS(g);
    const cd dCb = -0.25 * M_PI * Sb, dCg = -0.25 * M_PI * Sg;
    // db/domega = 1, dg/domega = 1/2
    return dSb * Cg * g + 0.5 * Sb * dCg * g + 0.5 * Sb * Cg + dCb * Sg * x + 0.5 * Cb * dSg * x;
}

long double rayleigh_lamb_real(long double xi, long double omega) {
    long double x = xi * xi;
    long double b = omega - x;
    long double g = 0.5L * omega - x;
    return entire::S_ld(b) * entire::C_ld(g) * g + entire::C_ld(b) * entire::S_ld(g) * x;
}

std::vector<BranchPoint> branch_eigenvalues(double xi, int count, const BranchOptions& opts) {
    if (count < 1) throw std::invalid_argument("branch_eigenvalues: count < 1");
    if (!std::isfinite(xi)) throw NumericalError("branch_eigenvalues: xi not finite");
    const double omega_hi = 2.0 * xi * xi + opts.scan_margin;
    auto f = [xi](double om) { return rayleigh_lamb(cd(xi), cd(om)).real(); };

    std::vector<double> roots;
    const int cells = (int)std::ceil((omega_hi - opts.omega_min) / opts.scan_step);
    auto grid_at = [&](int i) { return opts.omega_min + (omega_hi - opts.omega_min) * i / cells; };
    std::vector<double> fs(cells + 1, std::numeric_limits<double>::quiet_NaN());
    auto fs_at = [&](int i) {
        if (std::isnan(fs[i])) fs[i] = f(grid_at(i));
        return fs[i];
    };
    for (int i = 0; i <= std::min(cells, 1); ++i) fs_at(i);
    auto refine = [&](double a, double b, double fa, double fb) {
        roots.push_back(bisect(f, a, b, fa, fb, 1e-14 * std::max(1.0, b)));
    };
    for (int i = 0; i < cells && (int)roots.size() < count + 2; ++i) {
        fs_at(i);
        fs_at(i + 1);
        if (fs[i] == 0.0) {
            roots.push_back(grid_at(i));
        } else if (fs[i] * fs[i + 1] < 0.0) {
            refine(grid_at(i), grid_at(i + 1), fs[i], fs[i + 1]);
        } else if (i > 0 && std::abs(fs[i]) < 0.02 && std::abs(fs[i]) < std::abs(fs[i - 1]) &&
                   std::abs(fs[i]) < std::abs(fs[i + 1]) && fs[i - 1] * fs[i + 1] > 0.0) {
            // |Psi| dips without a sign change: resolve a possible tangency
            // or a close root pair on a 10x finer local grid.
            double a = grid_at(i - 1), fa = fs[i - 1];
            for (int j = 1; j <= 20; ++j) {
                const double m = grid_at(i - 1) + (grid_at(i + 1) - grid_at(i - 1)) * j / 20.0;
                const double fm = f(m);
                if (fa * fm < 0.0) refine(a, m, fa, fm);
                a = m;
                fa = fm;
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return b - a < 1e-9 * std::max(1.0, b); }),
                roots.end());
    if ((int)roots.size() < count)
        throw BracketFailure(
            "branch_eigenvalues: fewer than the requested sign changes in the scan window");
    std::vector<BranchPoint> out;
    for (int k = 0; k < count; ++k) {
        BranchPoint bp{xi, k + 1, roots[k], std::abs(rayleigh_lamb(cd(xi), cd(roots[k])))};
        if (bp.residual > opts.root_tol)
            throw ConvergenceFailure("branch_eigenvalues: residual above tolerance");
        out.push_back(bp);
    }
    return out;
}

double zeta1(double xi, const BranchOptions& opts) {
    return branch_eigenvalues(xi, 1, opts)[0].omega;
}

long double zeta1_precise(long double xi, double seed) {
    // secant in omega, long double
    long double a = seed * (1.0L - 1e-9L), b = seed * (1.0L + 1e-9L);
    long double fa = rayleigh_lamb_real(xi, a), fb = rayleigh_lamb_real(xi, b);
    for (int it = 0; it < 60; ++it) {
        if (fb == fa) break;
        long double c = b - fb * (b - a) / (fb - fa);
        a = b;
        fa = fb;
        b = c;
        fb = rayleigh_lamb_real(xi, b);
        if (std::abs(b - a) < 1e-19L * std::abs(b)) break;
    }
    return b;
}

ThresholdData threshold(const ThresholdOptions& opts) {
    BranchOptions bopts;
    auto z1 = [&bopts](double x) { return zeta1(x, bopts); };
    double kap = brent_minimize(z1, opts.window_lo, opts.window_hi, opts.xi_tol);
    if (kap - opts.window_lo < 10 * opts.xi_tol || opts.window_hi - kap < 10 * opts.xi_tol)
        throw ConvergenceFailure("threshold: minimiser pinned to the window boundary");

    // Extended-precision polish: parabolic iteration on zeta1 evaluated in
    // long double.  Double precision leaves Lambda with O(1e-15) error, which
    // would contaminate gaps of order 1e-14 on the sweep grids.
    long double k_ld = kap;
    double seed = z1(kap);
    long double h = 1e-3L;
    for (int it = 0; it < 4; ++it) {
        long double f0 = zeta1_precise(k_ld - h, seed);
        long double f1 = zeta1_precise(k_ld, seed);
        long double f2 = zeta1_precise(k_ld + h, seed);
        long double denom = f0 - 2.0L * f1 + f2;
        if (denom <= 0.0L) break;
        k_ld += 0.5L * h * (f0 - f2) / denom;
        h *= 0.03L;
    }
    long double lam_ld = zeta1_precise(k_ld, seed);

    ThresholdData td;
    td.kappa_precise = k_ld;
    td.lambda_precise = lam_ld;
    td.kappa = (double)k_ld;
    td.lambda = (double)lam_ld;
    td.residual = std::abs((double)rayleigh_lamb_real(k_ld, lam_ld));
    td.grid_step = bopts.scan_step;

    // zeta_1''(kappa) by symmetric differences with Richardson extrapolation.
    auto z1_ld = [&](long double x) { return zeta1_precise(x, seed); };
    const long double hh = opts.fd_step;
    auto second_diff = [&](long double step) {
        return (double)((z1_ld(k_ld + step) - 2.0L * lam_ld + z1_ld(k_ld - step)) / (step * step));
    };
    td.zeta1_pp_fullstep = second_diff(hh);
    td.zeta1_pp_halfstep = second_diff(hh / 2.0L);
    td.zeta1_pp = (4.0 * td.zeta1_pp_halfstep - td.zeta1_pp_fullstep) / 3.0;
    if (!(td.zeta1_pp > 0.0))
        throw ConvergenceFailure("threshold: zeta1''(kappa) not positive");
    return td;
}

double contour_root_count(cd omega, double re_lo, double re_hi, double theta,
                          const RootOptions& opts) {
    auto integrand = [omega](cd z) { return rayleigh_lamb_dxi(z, omega) / rayleigh_lamb(z, omega); };
    // closed rectangle, counterclockwise
    const std::array<cd, 4> corners = {cd(re_lo, -theta), cd(re_hi, -theta), cd(re_hi, theta),
                                       cd(re_lo, theta)};
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int panels = 8; panels <= opts.max_panels; panels *= 2) {
        cd acc = 0.0;
        const auto& gl = gauss_legendre(20);
        for (int e = 0; e < 4; ++e) {
            cd a = corners[e], b = corners[(e + 1) % 4];
            for (int p = 0; p < panels; ++p) {
                cd pa = a + (b - a) * (double(p) / panels);
                cd pb = a + (b - a) * (double(p + 1) / panels);
                cd mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
                for (int i = 0; i < 20; ++i)
                    acc += gl.weights[i] * integrand(mid + half * gl.nodes[i]) * half;
            }
        }
        double count = (acc / cd(0.0, 2.0 * M_PI)).real();
        if (!std::isnan(prev) && std::abs(count - prev) < opts.count_tol / 4.0) return count;
        prev = count;
    }
    return prev;
}

ComplexRootSet complex_roots_near_threshold(cd omega, const ThresholdData& thr,
                                            const RootOptions& opts) {
    if (std::abs(omega - cd(thr.lambda)) > opts.epsilon)
        throw NumericalError("complex_roots_near_threshold: omega outside the threshold window");

    const double kap = thr.kappa;
    const double hp = 1.0 / std::sqrt(thr.zeta1_pp / 2.0); // H'(0)
    const cd dz = cd(0.0, 1.0) * branch_sqrt(cd(thr.lambda) - omega) * hp;

    auto f = [omega](cd z) { return rayleigh_lamb(z, omega); };
    auto df = [omega](cd z) { return rayleigh_lamb_dxi(z, omega); };

    ComplexRootSet rs;
    rs.omega = omega;
    rs.strip_height = opts.theta;
    const std::array<cd, 4> seeds = {cd(kap) + dz, cd(kap) - dz, cd(-kap) + dz, cd(-kap) - dz};
    for (size_t i = 0; i < 4; ++i)
        rs.roots[i] = newton_complex(f, df, seeds[i], opts.newton_tol, 200);
    std::sort(rs.roots.begin(), rs.roots.end(), [](cd a, cd b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    double c1 = contour_root_count(omega, kap - opts.rect_halfwidth, kap + opts.rect_halfwidth,
                                   opts.theta, opts);
    double c2 = contour_root_count(omega, -kap - opts.rect_halfwidth, -kap + opts.rect_halfwidth,
                                   opts.theta, opts);
    rs.contour_count = c1 + c2;
    if (std::abs(rs.contour_count - 4.0) > opts.count_tol)
        throw RootCountMismatch("complex_roots_near_threshold: contour count != 4");
    return rs;
}

} // namespace lambtrap
