#pragma once

#include <Eigen/Dense>
#include <functional>

namespace bdf::quad {

struct Nodes {
  Eigen::ArrayXd x;
  Eigen::ArrayXd w;
};

// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on the three-term
// recurrence, accurate to machine precision for n up to a few thousand.
Nodes gauss_legendre(int n);

// Same rule mapped onto [a, b].
Nodes gauss_legendre_ab(int n, double a, double b);

// Rule for integrals over (0, inf) through eta = tan(theta); weights absorb
// the sec^2 Jacobian.  Converges fast for integrands analytic in eta with
// algebraic decay.
Nodes half_line_tan(int n);

// Adaptive Gauss-Kronrod on a finite interval (smooth integrands).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

// tanh-sinh rule on a finite interval; tolerates integrable endpoint
// singularities.
double integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12);

// Same rule, but f(x, xc) also receives the distance to the nearest endpoint,
// which stays accurate when x itself rounds to the endpoint.
double integrate_singular2(const std::function<double(double, double)>& f, double a,
                           double b, double rel_tol = 1e-12);

// Integral over (a, inf) for integrands with algebraic or exponential decay.
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double rel_tol = 1e-12);

}  // namespace bdf::quad
