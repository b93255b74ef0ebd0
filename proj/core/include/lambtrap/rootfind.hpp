#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>

#include "lambtrap/errors.hpp"

namespace lambtrap {

// Bisection refined by secant steps; f(a), f(b) must have opposite signs.
template <typename F, typename Real = double>
Real bisect(F&& f, Real a, Real b, Real fa, Real fb, Real xtol, int max_iter = 200) {
    if (fa == Real(0)) return a;
    if (fb == Real(0)) return b;
    if ((fa > Real(0)) == (fb > Real(0)))
        throw BracketFailure("bisect: endpoints do not bracket a sign change");
    for (int it = 0; it < max_iter; ++it) {
        Real m = Real(0.5) * (a + b);
        if (b - a < xtol) return m;
        Real fm = f(m);
        if (fm == Real(0)) return m;
        if ((fm > Real(0)) == (fa > Real(0))) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return Real(0.5) * (a + b);
}

template <typename F, typename Real = double>
Real bisect(F&& f, Real a, Real b, Real xtol, int max_iter = 200) {
    return bisect(f, a, b, f(a), f(b), xtol, max_iter);
}

// Scalar minimisation by golden-section with parabolic acceleration
// (Brent).  Returns the abscissa of the minimum in [a,b].
template <typename F, typename Real = double>
Real brent_minimize(F&& f, Real a, Real b, Real xtol, int max_iter = 200) {
    const Real gold = Real(0.3819660112501051);
    Real x = a + gold * (b - a), w = x, v = x;
    Real fx = f(x), fw = fx, fv = fx;
    Real d = 0, e = 0;
    for (int it = 0; it < max_iter; ++it) {
        Real m = Real(0.5) * (a + b);
        Real tol = xtol + std::numeric_limits<Real>::epsilon() * std::abs(x);
        if (std::abs(x - m) <= Real(2) * tol - Real(0.5) * (b - a)) return x;
        Real p = 0, q = 0, r = 0;
        bool parabolic = false;
        if (std::abs(e) > tol) {
            r = (x - w) * (fx - fv);
            q = (x - v) * (fx - fw);
            p = (x - v) * q - (x - w) * r;
            q = Real(2) * (q - r);
            if (q > Real(0)) p = -p;
            q = std::abs(q);
            if (std::abs(p) < std::abs(Real(0.5) * q * e) && p > q * (a - x) && p < q * (b - x)) {
                e = d;
                d = p / q;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = gold * e;
        }
        Real u = (std::abs(d) >= tol) ? x + d : x + (d > Real(0) ? tol : -tol);
        Real fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return x;
}

// Newton iteration for a holomorphic function with analytic derivative.
inline std::complex<double> newton_complex(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    const std::function<std::complex<double>(std::complex<double>)>& df,
    std::complex<double> z0, double tol, int max_iter = 100) {
    std::complex<double> z = z0;
    for (int it = 0; it < max_iter; ++it) {
        std::complex<double> fz = f(z);
        std::complex<double> dfz = df(z);
        if (std::abs(dfz) == 0.0) throw ConvergenceFailure("newton_complex: zero derivative");
        std::complex<double> step = fz / dfz;
        z -= step;
        if (std::abs(step) < tol * (1.0 + std::abs(z))) return z;
    }
    throw ConvergenceFailure("newton_complex: no convergence");
}

} // namespace lambtrap
