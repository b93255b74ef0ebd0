#pragma once

#include <functional>
#include <vector>

namespace lambtrap {

// Gauss-Legendre rule on [-1,1].  Nodes by Newton iteration on P_n, cached
// per order; thread-safe after first use of a given order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

// Gauss-Jacobi rule on [0,1] with weight (1-u)^alpha * u^beta, via
// Golub-Welsch on the Jacobi recurrence.
struct GaussJacobi {
    std::vector<double> nodes;
    std::vector<double> weights;
    double alpha = 0.0, beta = 0.0;
};
GaussJacobi gauss_jacobi01(int order, double alpha, double beta);

// Integrate f over [a,b] with a fixed-order rule.
double integrate(const std::function<double(double)>& f, double a, double b, int order = 32);

// Integrate f over the union of panels defined by consecutive breakpoints.
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breakpoints, int order = 16);

// Breakpoints for [a,b] split into roughly (b-a)/h panels.
std::vector<double> uniform_breakpoints(double a, double b, double h);

// Insert a geometric refinement around `center` (panels halving from
// `outer` down to `inner`) into an existing breakpoint set.  Used to
// resolve the near-pole of the DtN symbol at xi = kappa.
void refine_around(std::vector<double>& breakpoints, double center,
                   double outer, double inner, double lo, double hi);

} // namespace lambtrap
