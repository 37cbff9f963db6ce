#include "bdf/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

#include "bdf/errors.hpp"

namespace bdf::quad {

Nodes gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be positive");
  Nodes out;
  out.x.resize(n);
  out.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    out.x[i] = -x;
    out.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    out.w[i] = w;
    out.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) out.x[n / 2] = 0.0;
  return out;
}

Nodes gauss_legendre_ab(int n, double a, double b) {
  Nodes g = gauss_legendre(n);
  const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  Nodes out;
  out.x = mid + rad * g.x;
  out.w = rad * g.w;
  return out;
}

Nodes half_line_tan(int n) {
  Nodes g = gauss_legendre_ab(n, 0.0, M_PI / 2.0);
  Nodes out;
  out.x.resize(n);
  out.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(g.x[i]);
    out.x[i] = std::tan(g.x[i]);
    out.w[i] = g.w[i] / (c * c);
  }
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol);
}

double integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
  boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(f, a, b, rel_tol);
}

double integrate_singular2(const std::function<double(double, double)>& f, double a,
                           double b, double rel_tol) {
  boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(f, a, b, rel_tol);
}

double integrate_to_inf(const std::function<double(double)>& f, double a, double rel_tol) {
  boost::math::quadrature::exp_sinh<double> rule;
  if (a == 0.0) return rule.integrate(f, rel_tol);
  return rule.integrate([&](double t) { return f(a + t); }, rel_tol);
}

}  // namespace bdf::quad
