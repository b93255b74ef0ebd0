#pragma once

#include <vector>

namespace lambtrap {

// Bessel function of the first kind, integer order.
// Small arguments go through Miller's downward recurrence with Neumann-series
// normalisation; large arguments seed J0/J1 from the Hankel asymptotic
// expansion and recurse forward (stable for order < x).
// J_{-m}(x) = (-1)^m J_m(x) and J_m(-x) = (-1)^m J_m(x).
double bessel_j(int m, double x);

// J_0(x) .. J_{nmax}(x) in one pass, x >= 0.
void bessel_j_all(int nmax, double x, double* out);
std::vector<double> bessel_j_all(int nmax, double x);

// Half-integer orders J_{1/2}(x) .. J_{kmax+1/2}(x), x > 0.  Seeds are the
// elementary J_{±1/2}; direction of the recurrence picked by stability.
void bessel_j_half_all(int kmax, double x, double* out);

// J_{m}(x) for real order m = integer or half-integer given as 2m.
double bessel_j_real_order_twice(int twice_m, double x);

} // namespace lambtrap
