#include "lambtrap/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

namespace lambtrap {

static GaussLegendre compute_gl(int n) {
    GaussLegendre r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

const GaussLegendre& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order < 1");
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
    return it->second;
}

GaussJacobi gauss_jacobi01(int order, double alpha, double beta) {
    // Recurrence coefficients of the monic Jacobi polynomials on [-1,1]
    // with weight (1-x)^alpha (1+x)^beta, then map to [0,1].
    const int n = order;
    Eigen::VectorXd a(n), b(n);
    const double ab = alpha + beta;
    a(0) = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        a(k) = (beta * beta - alpha * alpha) / den;
    }
    for (int k = 1; k < n; ++k) {
        double num, den;
        if (k == 1) {
            num = 4.0 * (1.0 + alpha) * (1.0 + beta);
            den = (2.0 + ab) * (2.0 + ab) * (3.0 + ab);
        } else {
            num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
            den = (2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
        }
        b(k) = num / den;
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        J(k, k) = a(k);
        if (k + 1 < n) {
            double s = std::sqrt(b(k + 1));
            J(k, k + 1) = s;
            J(k + 1, k) = s;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // mu0 = int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^(a+b+1) B(a+1, b+1)
    double mu0 = std::pow(2.0, ab + 1.0) *
                 std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
    GaussJacobi r;
    r.alpha = alpha;
    r.beta = beta;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        double x = es.eigenvalues()(k);                 // on [-1,1]
        double w = mu0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
        // Map x in [-1,1] -> u in [0,1] with weight (1-u)^a u^b:
        // u = (1+x)/2, and (1-x)^a(1+x)^b dx = 2^(a+b+1) (1-u)^a u^b du.
        r.nodes[k] = 0.5 * (1.0 + x);
        r.weights[k] = w / std::pow(2.0, ab + 1.0);
    }
    return r;
}

double integrate(const std::function<double(double)>& f, double a, double b, int order) {
    const auto& gl = gauss_legendre(order);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += gl.weights[i] * f(mid + half * gl.nodes[i]);
    return s * half;
}

double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breakpoints, int order) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
        s += integrate(f, breakpoints[i], breakpoints[i + 1], order);
    return s;
}

std::vector<double> uniform_breakpoints(double a, double b, double h) {
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    std::vector<double> pts(n + 1);
    for (int i = 0; i <= n; ++i) pts[i] = a + (b - a) * i / n;
    return pts;
}

void refine_around(std::vector<double>& breakpoints, double center,
                   double outer, double inner, double lo, double hi) {
    std::set<double> pts(breakpoints.begin(), breakpoints.end());
    for (double d = outer; d > inner; d *= 0.5) {
        for (double p : {center - d, center + d})
            if (p > lo && p < hi) pts.insert(p);
    }
    if (center > lo && center < hi) {
        pts.insert(center - inner);
        pts.insert(center + inner);
        pts.insert(center);
    }
    breakpoints.assign(pts.begin(), pts.end());
}

} // namespace lambtrap
