#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bdf/lattice.hpp"

namespace bdf {

// Closed-form contour constant K_p = (1/2 pi) int d eta E(eta)^{-p}
//                                  = Gamma((p-1)/2) / (2 sqrt(pi) Gamma(p/2)), p > 1.
double k_p(double p);

// Sobolev-type embedding constant S_{p,q} = 4 pi (2 pi)^{-3/p} (int E^{-q})^{1/p},
// with int E^{-q} = pi^{3/2} Gamma((q-3)/2) / Gamma(q/2), q > 3.
double s_pq(double p, double q);

// Sharp Sobolev constant for ||u||_6 <= C6 ||grad u||_2 on R^3.
double c6();

// Uniform-norm interpolation constant 1 / (2 sqrt(pi)).
double c_inf();

// Exchange response constant C_M = 2 (int_0^inf t^2 E(2t)^{-4/3} E(t)^{-2} dt)^{1/2}.
double c_m();

// Exchange-to-kernel norm constant
//   C_R = (1/2 pi^2) inf_theta sup_x E(2x)^theta int du E(2u)^{-1-theta} |u-x|^{-2}.
double c_r();

struct CrDetail {
  double value = 0.0;
  double theta = 0.0;  // minimising exponent
  double sup_x = 0.0;  // radius achieving the sup at that theta
  bool bracketed = true;
};
CrDetail c_r_detail();

// Contraction coefficients of the fixed-point map: kappa(1) grows like
// sqrt(log lambda); kappa(n >= 2) are lambda-independent.  Requires lambda >= 3.
double kappa(int n, double lambda);

// Series derivative f'(x) = sum_{n>=2} n kappa_n x^{n-1}, truncated at n_max
// with a sqrt(n)-growth tail model.  `value` includes the modelled tail.
struct SeriesDerivative {
  double value = 0.0;
  double tail = 0.0;
};
SeriesDerivative f_prime(double x, int n_max = 500);

struct AlphaBound {
  double alpha_b = 0.0;   // admissible-coupling threshold
  double a_max = 0.0;     // max of a(x) = (x-b)/(kappa_1 x + x f'(x))
  double x_star = 0.0;    // largest maximiser
  double r_b = 0.0;       // contraction-ball radius x_star / a(x_star)
  double tail_fraction = 0.0;  // modelled tail share of f'(x_star)
  bool tail_ok = true;         // tail_fraction <= 1e-6
};
AlphaBound alpha_b(double lambda, double b, int n_max = 500);

struct Certificate {
  double alpha = 0.0;
  double lambda = 0.0;
  double b = 0.0;
  double n_c_norm = 0.0;
  double alpha_b_value = 0.0;
  double r_b = 0.0;
  double x_star = 0.0;
  bool weak_field = false;   // 2 sqrt(pi) alpha ||n||_C <= b
  bool alpha_bound = false;  // alpha <= alpha_b(lambda, b)
  bool banach_ball = false;  // fixed-point map contracts on the ball of radius r_b
  bool tail_ok = true;
  bool pass = false;
};
// Evaluates every sufficient condition for existence/uniqueness of the
// self-consistent vacuum at this coupling, cutoff, and source.  Never throws on
// a failed condition; flags are always reported.
Certificate check_conditions(double alpha, double lambda, const DensityField& n, double b);

struct FamilyResult {
  std::string name;
  long samples = 0;
  long violations = 0;
  double worst_ratio = 0.0;  // max over samples of lhs / rhs (<= 1 when clean)
  std::string worst_input;   // formatted sample achieving worst_ratio
};

struct InequalityReport {
  std::vector<FamilyResult> families;
  long total_violations = 0;
};

// Randomised verification of every elementary inequality the contraction proof
// uses (Peetre bounds, resolvent sums, response-matrix bound, the log-moment
// identity) plus the exchange-norm bound on random lattice kernels.
InequalityReport inequality_suite(long sample_count, std::uint64_t seed = 0,
                                  long kernel_samples = 0);

}  // namespace bdf
