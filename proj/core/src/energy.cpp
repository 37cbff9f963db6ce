#include "bdf/energy.hpp"

#include <cmath>

namespace bdf {

double kinetic_term(const KernelOperator& g) {
  const auto& lat = *g.lattice();
  double acc = 0.0;
  for (int p = 0; p < lat.mode_count(); ++p) {
    auto [plus, minus] = lambda_projectors(lat.mode(p));
    const Mat4 blk = g.block(p, p);
    const double up = (plus * blk * plus).trace().real();
    const double dn = (minus * blk * minus).trace().real();
    acc += energy_scale(lat.mode(p)) * (up - dn);
  }
  return lat.dv() * acc;
}

EnergyBreakdown bdf_energy(const KernelOperator& g, const DensityField& n, double alpha,
                           bool exchange_enabled) {
  require_same_lattice(g.lattice(), n.lattice(), "bdf_energy");
  EnergyBreakdown e;
  e.kinetic = kinetic_term(g);
  const DensityField rho = density_of(g);
  e.direct_external = -alpha * coulomb_product(rho, n);
  e.direct_self = 0.5 * alpha * coulomb_product(rho, rho);
  if (exchange_enabled)
    e.exchange = -0.5 * alpha * frobenius_inner(g, exchange_kernel(g)).real();
  e.total = e.kinetic + e.direct_external + e.direct_self + e.exchange;
  return e;
}

KernelOperator mean_field_operator(const KernelOperator& q, const DensityField& rho, double alpha,
                                   bool exchange_enabled) {
  require_same_lattice(q.lattice(), rho.lattice(), "mean_field_operator");
  KernelOperator d = free_dirac(q.lattice());
  d += alpha * coulomb_multiplier(rho);
  if (exchange_enabled) d -= alpha * exchange_kernel(q);
  return d;
}

double expand_around(const KernelOperator& q, const KernelOperator& g, const DensityField& n,
                     double alpha, bool exchange_enabled) {
  const DensityField rho_q = density_of(q) - n;
  const KernelOperator d_q = mean_field_operator(q, rho_q, alpha, exchange_enabled);
  const DensityField rho_g = density_of(g);
  double out = frobenius_inner(d_q, g).real() + 0.5 * alpha * coulomb_product(rho_g, rho_g);
  if (exchange_enabled) out -= 0.5 * alpha * frobenius_inner(g, exchange_kernel(g)).real();
  return out;
}

AdmissibilityReport check_admissible(const KernelOperator& g, double tol) {
  const KernelOperator state = p0_projector(g.lattice()) + g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.op_matrix(),
                                                     Eigen::EigenvaluesOnly);
  AdmissibilityReport rep;
  rep.min_eig = es.eigenvalues().minCoeff();
  rep.max_eig = es.eigenvalues().maxCoeff();
  rep.admissible = rep.min_eig >= -tol && rep.max_eig <= 1.0 + tol;
  return rep;
}

LowerBoundVerdict lower_bound_check(const KernelOperator& g, const DensityField& n, double alpha) {
  LowerBoundVerdict v;
  v.admissible = check_admissible(g).admissible;
  v.energy_total = bdf_energy(g, n, alpha).total;
  v.bound = -0.5 * alpha * coulomb_product(n, n);
  v.bound_holds = v.energy_total >= v.bound - 1e-9 * (1.0 + std::abs(v.energy_total));
  return v;
}

double exchange_bound_ratio(const KernelOperator& q) {
  const double num = frobenius_inner(q, exchange_kernel(q)).real();
  const KernelOperator sq = compose(q, q);
  const auto& lat = *q.lattice();
  double den = 0.0;
  for (int p = 0; p < lat.mode_count(); ++p)
    den += energy_scale(lat.mode(p)) * sq.block(p, p).trace().real();
  den *= lat.dv() * M_PI / 2.0;
  return num / den;
}

}  // namespace bdf
