#pragma once

#include "bdf/kernel.hpp"

namespace bdf {

// Linear-response (vacuum polarisation) function B(k) of the cutoff vacuum:
// the first-order density reads rho_1(k) = -B(k) rho'(k).

// Radial form (Pauli-Rose): one smooth 1d integral, stable for cutoffs up to
// ~1e12.  Valid for k_abs >= 0; relative accuracy ~1e-9.
double b_lambda_1d(double k_abs, double lambda);

// Full 3d momentum integral over the cutoff region: loop momentum restricted
// to |l| <= lambda, fermion energies at l +- k/2.  Throws on k = 0.
double b_lambda_3d(const Vec3& k, double lambda);

// Exact closed form at k = 0:
//   B(0) = (1/pi) [ 2/3 asinh(L) - 2/3 Z + Z^3/9 ],  Z = L/E(L).
double b_lambda_zero_closed(double lambda);

// Leading large-cutoff behaviour (2/(3 pi)) log(lambda) - 5/(9 pi) + (2/(3 pi)) log 2.
double b_lambda_zero_asymptotic(double lambda);

// Coupling renormalisation alpha / (1 + 2 alpha/(3 pi) log lambda).
double dressed_alpha(double alpha, double lambda);

// Lattice-discretised response at difference mode d: the multiplier such that
// the first-order density of the lattice model is exactly -b_lattice * rho'.
double b_lattice(const Lattice& lat, int diff_index);

// First-order density -b_lambda_1d(|k|) rho'(k) evaluated on every difference
// mode (continuum response sampled on the lattice).
DensityField first_order_density(const DensityField& rho_prime, double lambda);

// Equivalent potential form -(1/4 pi) |k|^2 B(k) phi'(k); k = 0 contributes
// nothing since potentials have no zero mode.
DensityField first_order_density_from_potential(const DensityField& phi_prime, double lambda);

struct PerturbativeTerm {
  KernelOperator kernel;   // Q_n
  int nodes = 0;           // contour nodes used on the half line
  double delta = 0.0;      // change under the last node doubling (HS norm)
  bool converged = false;  // delta below tolerance before the node cap
};

// n-th order term of the resolvent expansion of the vacuum projector in the
// potential alpha(phi' - R_Q) (the alpha power is left out):
//   Q_n = -(1/2 pi) integral d eta  res (V res)^n,   V = R_Q - phi'-multiplier,
// evaluated on a tan-mapped Gauss contour, doubling nodes until the result is
// stable.  Q = 0 gives the pure-potential terms.
PerturbativeTerm perturbative_term(int order, const KernelOperator& q,
                                   const DensityField& rho_prime, int start_nodes = 64,
                                   int max_nodes = 512, double tol = 1e-8);

struct FurryCheck {
  double max_abs = 0.0;    // largest |rho_2(k)|
  double scale = 0.0;      // largest |rho'(k)|
  bool vanishes = false;   // max_abs <= tol * scale
};

// Second-order density of a pure potential vanishes (charge-conjugation
// symmetry); verified here directly from the eta-contour evaluation.
FurryCheck furry_check(const DensityField& rho_prime, double tol = 1e-10);

}  // namespace bdf
