#include "oracles.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "lambtrap/quadrature.hpp"

namespace oracles {

using lambtrap::ThresholdData;
using lambtrap::ThresholdModeData;
using cd = std::complex<double>;

const ThresholdData& thr() {
    static ThresholdData t = lambtrap::threshold();
    return t;
}

const ThresholdModeData& mode() {
    static ThresholdModeData m = lambtrap::threshold_mode(thr());
    return m;
}

cd rayleigh_lamb_literal(cd xi, cd omega) {
    const cd beta = lambtrap::branch_sqrt(omega - xi * xi);
    const cd gamma = lambtrap::branch_sqrt(0.5 * omega - xi * xi);
    const double ph = M_PI / 2.0;
    return std::sin(beta * ph) / beta * std::cos(gamma * ph) * gamma * gamma +
           std::cos(beta * ph) * std::sin(gamma * ph) / gamma * xi * xi;
}

long double bessel_j_series(int m, long double x) {
    // J_m(x) = sum_k (-1)^k (x/2)^(m+2k) / (k! (m+k)!)
    long double term = 1.0L;
    for (int i = 1; i <= m; ++i) term *= (x / 2.0L) / i;
    long double acc = term;
    for (int k = 1; k <= 40; ++k) {
        term *= -(x / 2.0L) * (x / 2.0L) / ((long double)k * (m + k));
        acc += term;
    }
    return acc;
}

double bessel_j_integral(int m, double x, int panels) {
    // periodic integrand: trapezoid = midpoint sum
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double t = 2.0 * M_PI * i / panels;
        acc += std::cos(-m * t + x * std::sin(t));
    }
    return acc / panels;
}

namespace {

// One FEM pass: P1 elements on (0, pi/2) for the real-variable form of the
// channel-2 operator (u2 = i w), essential w(0) = 0, mean of u1 deflated.
std::vector<double> fem_pass(double xi, int count, int n, bool deflate = true) {
    const double L = M_PI / 2.0;
    const double h = L / n;
    const int nu = n + 1; // u1 dofs
    const int nw = n + 1; // w dofs before the essential condition
    const int total = nu + nw;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(total, total);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(total, total);
    const double mloc[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
    const double sloc[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
    const double dloc[2][2] = {{-0.5, -0.5}, {0.5, 0.5}}; // int phi_i' phi_j
    for (int e = 0; e < n; ++e) {
        const int iu[2] = {e, e + 1};
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const int Ua = iu[a], Ub = iu[b];
                const int Wa = nu + iu[a], Wb = nu + iu[b];
                K(Ua, Ub) += 2.0 * xi * xi * mloc[a][b] + sloc[a][b];
                K(Wa, Wb) += xi * xi * mloc[a][b] + 2.0 * sloc[a][b];
                // -xi (u1' z + w v1'): symmetric cross blocks
                K(Ua, Wb) += -xi * dloc[a][b]; // v=u1 slot a, w slot b: -xi int phi_a' phi_b
                K(Wb, Ua) += -xi * dloc[a][b];
                M(Ua, Ub) += mloc[a][b];
                M(Wa, Wb) += mloc[a][b];
            }
        }
    }
    // essential w(0) = 0, then deflate the u1 mean (h_2 restriction)
    std::vector<int> keep;
    for (int i = 0; i < total; ++i)
        if (i != nu) keep.push_back(i);
    const int nk = (int)keep.size();
    Eigen::MatrixXd Kr(nk, nk), Mr(nk, nk);
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j < nk; ++j) {
            Kr(i, j) = K(keep[i], keep[j]);
            Mr(i, j) = M(keep[i], keep[j]);
        }
    Eigen::MatrixXd Kz = Kr, Mz = Mr;
    if (deflate) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(nk);
        for (int i = 0; i < nk; ++i) {
            const int g = keep[i];
            if (g < nu) mean(i) = (g == 0 || g == n) ? h / 2.0 : h; // int phi_i
        }
        Eigen::MatrixXd H = Eigen::MatrixXd::Identity(nk, nk);
        Eigen::VectorXd v = mean;
        v(0) += (mean(0) >= 0 ? 1.0 : -1.0) * mean.norm();
        H -= (2.0 / v.squaredNorm()) * (v * v.transpose());
        Eigen::MatrixXd Z = H.rightCols(nk - 1);
        Kz = Z.transpose() * Kr * Z;
        Mz = Z.transpose() * Mr * Z;
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kz, Mz);
    std::vector<double> ev(count);
    for (int i = 0; i < count; ++i) ev[i] = es.eigenvalues()(i);
    return ev;
}

} // namespace

std::vector<double> ode_eigenvalues_fem(double xi, int count, int elements) {
    auto c1 = fem_pass(xi, count, elements);
    auto c2 = fem_pass(xi, count, 2 * elements);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = (4.0 * c2[i] - c1[i]) / 3.0;
    return out;
}

std::vector<double> ode_eigenvalues_fem_undeflated(double xi, int count, int elements) {
    auto c1 = fem_pass(xi, count, elements, false);
    auto c2 = fem_pass(xi, count, 2 * elements, false);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = (4.0 * c2[i] - c1[i]) / 3.0;
    return out;
}

double weber_schafheitlin_brute(int a, int b, double cutoff) {
    auto f = [a, b](double t) {
        return std::cyl_bessel_j(a, t) * std::cyl_bessel_j(b, t) / t;
    };
    double acc = lambtrap::integrate_panels(
        f, lambtrap::uniform_breakpoints(1e-10, cutoff, 1.0), 12);
    acc += std::cos(0.5 * M_PI * (a - b)) / (M_PI * cutoff); // leading smooth tail
    return acc;
}

} // namespace oracles
