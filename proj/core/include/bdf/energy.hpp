#pragma once

#include "bdf/kernel.hpp"

namespace bdf {

struct EnergyBreakdown {
  double kinetic = 0.0;          // tr |D0| G++  -  tr |D0| G--
  double direct_external = 0.0;  // -alpha D(rho_G, n)
  double direct_self = 0.0;      // +alpha/2 D(rho_G, rho_G)
  double exchange = 0.0;         // -alpha/2 integral |G(x,y)|^2 / |x-y|
  double total = 0.0;
};

// Kinetic term evaluated in the free-vacuum block decomposition:
//   dv sum_p E(p) [ tr(L+ G(p,p) L+) - tr(L- G(p,p) L-) ].
double kinetic_term(const KernelOperator& g);

// Reduced-model energy (exchange term dropped) is obtained with
// exchange_enabled = false; the exchange kernel is then never built.
EnergyBreakdown bdf_energy(const KernelOperator& g, const DensityField& n, double alpha,
                           bool exchange_enabled = true);

// Mean-field operator D = D0 + alpha V(rho) - alpha R_Q.  rho is the potential
// source (total density rho_Q - n, or the preconditioned iterate).
KernelOperator mean_field_operator(const KernelOperator& q, const DensityField& rho, double alpha,
                                   bool exchange_enabled = true);

// Energy difference E(Q + g) - E(Q) through the expansion around Q:
//   tr(D_Q g) + alpha/2 D(rho_g, rho_g) - alpha/2 integral |g|^2/|x-y|,
// which matches bdf_energy(Q + g) - bdf_energy(Q) identically on the lattice.
double expand_around(const KernelOperator& q, const KernelOperator& g, const DensityField& n,
                     double alpha, bool exchange_enabled = true);

struct AdmissibilityReport {
  bool admissible = false;
  double min_eig = 0.0;  // extreme eigenvalues of P0 + G
  double max_eig = 0.0;
};
// G is admissible when P0 + G has spectrum inside [0, 1] (tolerance on both
// ends) -- i.e. G is a density-matrix fluctuation of the free vacuum.
AdmissibilityReport check_admissible(const KernelOperator& g, double tol = 1e-9);

struct LowerBoundVerdict {
  bool admissible = false;
  bool bound_holds = false;
  double energy_total = 0.0;
  double bound = 0.0;  // -alpha/2 D(n, n)
};
// Stability bound E(G) + alpha/2 D(n,n) >= 0, valid for alpha <= 4/pi.
LowerBoundVerdict lower_bound_check(const KernelOperator& g, const DensityField& n, double alpha);

// Diagnostic ratio of the exchange pairing to its kinetic-energy bound
//   integral |Q(x,y)|^2/|x-y|  <=  pi/2 tr(|D0| Q^2);
// returns the ratio (should stay below 1 in the continuum limit).
double exchange_bound_ratio(const KernelOperator& q);

}  // namespace bdf
