#include "bdf/response.hpp"

#include <cmath>
#include <vector>

#include "bdf/quadrature.hpp"

namespace bdf {

double b_lambda_1d(double k_abs, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("b_lambda_1d: lambda must be positive");
  if (k_abs < 0.0) throw ConfigError("b_lambda_1d: k_abs must be >= 0");
  // Radial integrand in the velocity variable z = tanh(u); the substitution
  // removes the 1/(1-z^2) weight and keeps the rule stable for huge cutoffs.
  const double u_max = std::asinh(lambda);
  const double k2 = k_abs * k_abs;
  auto f = [&](double u) {
    const double z = std::tanh(u);
    const double sech2 = 1.0 - z * z;
    const double z2 = z * z;
    return (z2 - z2 * z2 / 3.0) / (1.0 + 0.25 * k2 * sech2);
  };
  return quad::integrate(f, 0.0, u_max, 1e-9) / M_PI;
}

double b_lambda_3d(const Vec3& k, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("b_lambda_3d: lambda must be positive");
  const double kk = k.norm();
  if (!(kk > 0.0)) throw ConfigError("b_lambda_3d: k = 0 not allowed (use the closed form)");

  // Cutoff on the loop momentum: |l| <= lambda, fermion energies E(l +- k/2).
  const double k2q = 0.25 * kk * kk;
  const quad::Nodes gl = quad::gauss_legendre(64);

  auto inner = [&](double r) {
    double acc = 0.0;
    for (int i = 0; i < gl.x.size(); ++i) {
      const double mu = 0.5 * (gl.x[i] + 1.0);  // even in mu: fold onto [0, 1]
      const double w = 0.5 * gl.w[i];
      const double cross = r * mu * kk;
      const double ep = std::sqrt(1.0 + r * r + cross + k2q);
      const double em = std::sqrt(1.0 + r * r - cross + k2q);
      const double num = r * r - k2q + 1.0 - ep * em;
      acc += w * num / (ep * em * (ep + em));
    }
    return 2.0 * acc;
  };
  const double radial =
      quad::integrate([&](double r) { return r * r * inner(r); }, 0.0, lambda, 1e-8);
  return -2.0 * M_PI * radial / (M_PI * M_PI * kk * kk);
}

double b_lambda_zero_closed(double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("b_lambda_zero_closed: lambda must be positive");
  const double u = std::asinh(lambda);
  const double z = std::tanh(u);  // = lambda / E(lambda), but stable for huge lambda
  return (2.0 / 3.0 * u - 2.0 / 3.0 * z + z * z * z / 9.0) / M_PI;
}

double b_lambda_zero_asymptotic(double lambda) {
  return 2.0 / (3.0 * M_PI) * std::log(lambda) - 5.0 / (9.0 * M_PI) +
         2.0 / (3.0 * M_PI) * std::log(2.0);
}

double dressed_alpha(double alpha, double lambda) {
  return alpha / (1.0 + 2.0 * alpha / (3.0 * M_PI) * std::log(lambda));
}

double b_lattice(const Lattice& lat, int diff_index) {
  if (diff_index == lat.zero_diff()) return 0.0;  // pair overlap vanishes at p = q
  const double k2 = lat.diff(diff_index).squaredNorm();
  double acc = 0.0;
  for (const auto& [a, b] : lat.pairs(diff_index)) {
    const Vec3& pa = lat.mode(a);
    const Vec3& pb = lat.mode(b);
    acc += pair_trace(pa, pb) / (energy_scale(pa) + energy_scale(pb));
  }
  return lat.dv() * acc / (M_PI * M_PI * k2);
}

DensityField first_order_density(const DensityField& rho_prime, double lambda) {
  const auto& lat = *rho_prime.lattice();
  DensityField out(rho_prime.lattice());
  for (int d = 0; d < lat.diff_count(); ++d)
    out[d] = -b_lambda_1d(lat.diff(d).norm(), lambda) * rho_prime[d];
  return out;
}

DensityField first_order_density_from_potential(const DensityField& phi_prime, double lambda) {
  const auto& lat = *phi_prime.lattice();
  DensityField out(phi_prime.lattice());
  for (int d = 0; d < lat.diff_count(); ++d) {
    if (d == lat.zero_diff()) continue;
    const double k2 = lat.diff(d).squaredNorm();
    out[d] = -k2 * b_lambda_1d(std::sqrt(k2), lambda) * phi_prime[d] / (4.0 * M_PI);
  }
  return out;
}

namespace {

// res(eta) = (D0 + i eta)^{-1}: diagonal 4x4 factors (d(p) - i eta)/(E^2 + eta^2).
std::vector<Mat4> resolvent_factors(const Lattice& lat, double eta) {
  std::vector<Mat4> r(lat.mode_count());
  for (int p = 0; p < lat.mode_count(); ++p) {
    const double e2 = 1.0 + lat.mode(p).squaredNorm();
    r[p] = (d0_block(lat.mode(p)) - cxd(0.0, eta) * Mat4::Identity()) / (e2 + eta * eta);
  }
  return r;
}

void scale_block_rows(Eigen::MatrixXcd& x, const std::vector<Mat4>& r) {
  for (size_t a = 0; a < r.size(); ++a)
    x.middleRows<4>(4 * static_cast<Eigen::Index>(a)) =
        r[a] * x.middleRows<4>(4 * static_cast<Eigen::Index>(a));
}

void scale_block_cols(Eigen::MatrixXcd& x, const std::vector<Mat4>& r) {
  for (size_t b = 0; b < r.size(); ++b)
    x.middleCols<4>(4 * static_cast<Eigen::Index>(b)) =
        x.middleCols<4>(4 * static_cast<Eigen::Index>(b)) * r[b];
}

// Half-line contour sum S = sum_i w_i res (V res)^n at eta_i > 0; the negative
// half line is its adjoint because V is self-adjoint and res(-eta) = res(eta)^*.
Eigen::MatrixXcd contour_half_sum(const Lattice& lat, const Eigen::MatrixXcd& v, int order,
                                  int nodes) {
  const quad::Nodes rule = quad::half_line_tan(nodes);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(v.rows(), v.cols());
  Eigen::MatrixXcd x;
  for (int i = 0; i < nodes; ++i) {
    const auto r = resolvent_factors(lat, rule.x[i]);
    x = v;
    scale_block_rows(x, r);
    scale_block_cols(x, r);
    for (int j = 2; j <= order; ++j) {
      x = (lat.dv() * x * v).eval();
      scale_block_cols(x, r);
    }
    s += rule.w[i] * x;
  }
  return s;
}

}  // namespace

PerturbativeTerm perturbative_term(int order, const KernelOperator& q,
                                   const DensityField& rho_prime, int start_nodes, int max_nodes,
                                   double tol) {
  if (order < 1) throw ConfigError("perturbative_term: order must be >= 1");
  require_same_lattice(q.lattice(), rho_prime.lattice(), "perturbative_term");
  const auto& latp = q.lattice();
  const auto& lat = *latp;

  KernelOperator v = -coulomb_multiplier(rho_prime);
  if (q.raw().norm() > 0.0) v += exchange_kernel(q);

  PerturbativeTerm out{KernelOperator::zero(latp), 0, 0.0, false};
  Eigen::MatrixXcd prev;
  for (int n = start_nodes; n <= max_nodes; n *= 2) {
    Eigen::MatrixXcd s = contour_half_sum(lat, v.raw(), order, n);
    Eigen::MatrixXcd qn = -(s + s.adjoint().eval()) / (2.0 * M_PI);
    out.nodes = n;
    if (prev.size() > 0) {
      out.delta = lat.dv() * (qn - prev).norm();
      if (out.delta <= tol * (1.0 + lat.dv() * qn.norm())) {
        out.converged = true;
        out.kernel.raw() = std::move(qn);
        return out;
      }
    }
    prev = std::move(qn);
  }
  out.kernel.raw() = std::move(prev);
  return out;
}

FurryCheck furry_check(const DensityField& rho_prime, double tol) {
  const PerturbativeTerm q2 =
      perturbative_term(2, KernelOperator::zero(rho_prime.lattice()), rho_prime, 64, 128, 1e-8);
  const DensityField rho2 = density_of(q2.kernel);
  FurryCheck out;
  for (int d = 0; d < rho2.size(); ++d) {
    out.max_abs = std::max(out.max_abs, std::abs(rho2[d]));
    out.scale = std::max(out.scale, std::abs(rho_prime[d]));
  }
  out.vanishes = out.max_abs <= tol * out.scale;
  return out;
}

}  // namespace bdf
