#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace affgeom::quad {

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod on a finite interval; throws NumericError when the
// error estimate stays above `tol` (absolute) after refinement.
double integrate(const Fn& f, double a, double b, double tol = 1e-10);

// Finite interval with possible endpoint singularities (tanh-sinh).
double integrate_singular(const Fn& f, double a, double b, double tol = 1e-10);

// [a, inf) with a decaying integrand (exp-sinh).
double integrate_half_line(const Fn& f, double a = 0.0, double tol = 1e-10);

// Splits [a,b] at the given interior break points, integrating each piece.
double integrate_pieces(const Fn& f, std::vector<double> breaks, double tol = 1e-10);

// Brent minimisation on [lo, hi]: returns (argmin, min).
std::pair<double, double> minimize(const Fn& f, double lo, double hi);

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

// Root of a monotone function on [lo, hi] by bisection.
double bisect(const Fn& f, double lo, double hi, double tol = 1e-14);

}  // namespace affgeom::quad
