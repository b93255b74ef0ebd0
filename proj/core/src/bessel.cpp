#include "lambtrap/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lambtrap {

namespace {

// Hankel asymptotic expansion for J_0, J_1; good to ~1e-15 for x >= 25.
void j0_j1_asymptotic(double x, double& j0, double& j1) {
    auto pq = [x](double nu, double& p, double& q) {
        const double mu = 4.0 * nu * nu;
        double term = 1.0;
        p = 1.0;
        q = 0.0;
        const double inv8x = 1.0 / (8.0 * x);
        for (int k = 0; k < 8; ++k) {
            // a_{k+1} = a_k * (mu - (2k+1)^2) / ((k+1) 8x)
            double odd = 2.0 * k + 1.0;
            term *= (mu - odd * odd) * inv8x / (k + 1.0);
            if (k % 2 == 0)
                q += (k % 4 == 0 ? term : -term);
            else
                p += (k % 4 == 1 ? -term : term);
            if (std::abs(term) < 1e-18) break;
        }
    };
    double p0, q0, p1, q1;
    pq(0.0, p0, q0);
    pq(1.0, p1, q1);
    const double c = std::sqrt(2.0 / (M_PI * x));
    const double chi0 = x - 0.25 * M_PI;
    const double chi1 = x - 0.75 * M_PI;
    j0 = c * (p0 * std::cos(chi0) - q0 * std::sin(chi0));
    j1 = c * (p1 * std::cos(chi1) - q1 * std::sin(chi1));
}

void miller_all(int nmax, double x, double* out) {
    // Downward recurrence from a padded start order, normalised by
    // 1 = J_0 + 2 J_2 + 2 J_4 + ...
    int big = std::max(nmax, static_cast<int>(std::ceil(x)));
    int M = big + 18 + static_cast<int>(2.0 * std::sqrt(static_cast<double>(big)));
    if (M % 2) ++M;
    double yp = 0.0, y = 1e-30, norm = 0.0;
    for (int k = M; k >= 1; --k) {
        double ym = (2.0 * k / x) * y - yp;
        yp = y;
        y = ym;
        if (k - 1 <= nmax) out[k - 1] = y;
        if ((k - 1) % 2 == 0) norm += (k - 1 == 0) ? y : 2.0 * y;
        if (std::abs(y) > 1e250) {
            const double s = 1e-250;
            y *= s;
            yp *= s;
            norm *= s;
            if (k - 1 <= nmax)
                for (int j = k - 1; j <= nmax; ++j) out[j] *= s;
        }
    }
    for (int j = 0; j <= nmax; ++j) out[j] /= norm;
}

} // namespace

void bessel_j_all(int nmax, double x, double* out) {
    if (nmax < 0) throw std::invalid_argument("bessel_j_all: nmax < 0");
    if (!(x >= 0.0)) throw std::invalid_argument("bessel_j_all: x must be >= 0");
    if (x == 0.0) {
        out[0] = 1.0;
        for (int k = 1; k <= nmax; ++k) out[k] = 0.0;
        return;
    }
    if (x < 30.0 || x < 1.5 * nmax + 10.0) {
        miller_all(nmax, x, out);
        return;
    }
    double j0, j1;
    j0_j1_asymptotic(x, j0, j1);
    out[0] = j0;
    if (nmax >= 1) out[1] = j1;
    for (int k = 1; k < nmax; ++k) out[k + 1] = (2.0 * k / x) * out[k] - out[k - 1];
}

std::vector<double> bessel_j_all(int nmax, double x) {
    std::vector<double> v(nmax + 1);
    bessel_j_all(nmax, x, v.data());
    return v;
}

double bessel_j(int m, double x) {
    double sign = 1.0;
    if (m < 0) {
        m = -m;
        if (m % 2) sign = -sign;
    }
    if (x < 0) {
        x = -x;
        if (m % 2) sign = -sign;
    }
    std::vector<double> buf(m + 1);
    bessel_j_all(m, x, buf.data());
    return sign * buf[m];
}

void bessel_j_half_all(int kmax, double x, double* out) {
    if (!(x > 0.0)) throw std::invalid_argument("bessel_j_half_all: x must be > 0");
    const double c = std::sqrt(2.0 / (M_PI * x));
    const double jhalf = c * std::sin(x);
    if (x > kmax + 1.5 + 10.0) {
        // forward recurrence, stable while order < x
        double jm = c * std::cos(x); // J_{-1/2}
        out[0] = jhalf;
        double prev = jm, cur = jhalf;
        for (int k = 0; k < kmax; ++k) {
            double nu = k + 0.5;
            double nxt = (2.0 * nu / x) * cur - prev;
            prev = cur;
            cur = nxt;
            out[k + 1] = cur;
        }
        return;
    }
    // downward recurrence normalised against the elementary J_{1/2}
    int M = kmax + 18 + static_cast<int>(2.0 * std::sqrt(static_cast<double>(kmax + 2)));
    double yp = 0.0, y = 1e-30;
    std::vector<double> tmp(kmax + 1, 0.0);
    for (int k = M; k >= 1; --k) {
        double nu = k + 0.5;
        double ym = (2.0 * nu / x) * y - yp;
        yp = y;
        y = ym;
        if (k - 1 <= kmax) tmp[k - 1] = y;
        if (std::abs(y) > 1e250) {
            const double s = 1e-250;
            y *= s;
            yp *= s;
            for (int j = k - 1; j <= kmax; ++j)
                if (j >= 0) tmp[j] *= s;
        }
    }
    const double scale = jhalf / tmp[0];
    for (int j = 0; j <= kmax; ++j) out[j] = tmp[j] * scale;
}

double bessel_j_real_order_twice(int twice_m, double x) {
    if (twice_m % 2 == 0) return bessel_j(twice_m / 2, x);
    if (twice_m < 0) throw std::invalid_argument("negative half-integer order not needed");
    int k = (twice_m - 1) / 2;
    std::vector<double> buf(k + 1);
    bessel_j_half_all(k, x, buf.data());
    return buf[k];
}

} // namespace lambtrap
