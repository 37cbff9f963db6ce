#pragma once

#include <Eigen/Dense>
#include <string>

#include "bdf/dirac.hpp"
#include "bdf/lattice.hpp"

namespace bdf {

// Two-point operator kernel A(p, q) on the lattice ball: one 4x4 spinor block
// per ordered mode pair, stored dense.  Kernels follow the integral-operator
// convention, so composition and traces carry the momentum volume element dv:
//
//   (A o B)(p, q) = dv sum_l A(p, l) B(l, q)         tr A = dv sum_p tr A(p, p)
//   <A, B> = dv^2 sum_{p,q} tr[A(p,q)^* B(p,q)]      ||A||_HS^2 = <A, A>
//
// Multiplication operators (projectors, resolvents) therefore carry 1/dv on
// their diagonal blocks; op_matrix() = dv * raw() is the representation in the
// orthonormal mode basis, where projectors are genuinely idempotent matrices.
class KernelOperator {
public:
  explicit KernelOperator(LatticePtr lat);
  static KernelOperator zero(const LatticePtr& lat) { return KernelOperator(lat); }
  static KernelOperator identity(const LatticePtr& lat);
  static KernelOperator from_op_matrix(const LatticePtr& lat, const Eigen::MatrixXcd& m);

  const LatticePtr& lattice() const { return lat_; }
  int mode_count() const { return static_cast<int>(raw_.rows() / 4); }
  int dim() const { return static_cast<int>(raw_.rows()); }

  Eigen::MatrixXcd& raw() { return raw_; }
  const Eigen::MatrixXcd& raw() const { return raw_; }
  Eigen::Block<Eigen::MatrixXcd, 4, 4> block(int a, int b) {
    return raw_.block<4, 4>(4 * a, 4 * b);
  }
  Eigen::Block<const Eigen::MatrixXcd, 4, 4> block(int a, int b) const {
    return raw_.block<4, 4>(4 * a, 4 * b);
  }

  Eigen::MatrixXcd op_matrix() const { return lat_->dv() * raw_; }

  KernelOperator& operator+=(const KernelOperator& o);
  KernelOperator& operator-=(const KernelOperator& o);
  KernelOperator& operator*=(double s);
  KernelOperator& operator*=(cxd s);
  KernelOperator operator-() const;

  KernelOperator adjoint() const;
  cxd trace() const;
  double hs_norm() const { return lat_->dv() * raw_.norm(); }

private:
  LatticePtr lat_;
  Eigen::MatrixXcd raw_;
};

KernelOperator operator+(KernelOperator a, const KernelOperator& b);
KernelOperator operator-(KernelOperator a, const KernelOperator& b);
KernelOperator operator*(double s, KernelOperator a);
KernelOperator operator*(cxd s, KernelOperator a);

KernelOperator compose(const KernelOperator& a, const KernelOperator& b);
cxd frobenius_inner(const KernelOperator& a, const KernelOperator& b);

// Free Dirac operator as a (diagonal) kernel.
KernelOperator free_dirac(const LatticePtr& lat);

// Free vacuum projector P0 = 1_{(-inf,0)}(D0): diagonal blocks L-(p)/dv.
KernelOperator p0_projector(const LatticePtr& lat);

// Trace split across the free vacuum: tr A++ + tr A--, evaluated from the
// diagonal blocks sandwiched with L±(p).
double p0_trace(const KernelOperator& a);

// Same split against an arbitrary projector, evaluated the long way through
// kernel composition (tr PAP + tr (1-P)A(1-P)).
double projector_split_trace(const KernelOperator& a, const KernelOperator& proj);

struct ChargeResult {
  double str;         // tr Q++ + tr Q--
  double cube_trace;  // tr Q^3 (equals str when Q is a projector difference)
  double plain_trace; // tr Q, recorded separately as a discretisation observable
  bool integer_ok;    // str within tol of its nearest integer
  long nearest;       // that integer
};
ChargeResult vacuum_charge(const KernelOperator& q, double tol = 1e-6);

// rho(k) = dv (2 pi)^{-3/2} sum_{p - q = k} tr G(p, q).
DensityField density_of(const KernelOperator& g);

// Coulomb exchange convolution:
//   R(p, q) = dv / (2 pi^2) sum_{l != 0, p - l in ball} Q(p - l, q - l) / |l|^2,
// i.e. the position-space kernel Q(x, y) / |x - y|.  Pairs leaving the ball are
// dropped.
KernelOperator exchange_kernel(const KernelOperator& q);

// Multiplication by the Coulomb potential of rho:
//   V(p, q) = (2 pi)^{-3/2} phi(p - q) I4 with phi(k) = 4 pi rho(k) / |k|^2.
KernelOperator coulomb_multiplier(const DensityField& rho);

// Weighted kernel norms.  q_norm carries E(p-q)^2 E(p+q); r_norm carries
// E(p-q)^2 / E(p+q).
double q_norm(const KernelOperator& q);
double r_norm(const KernelOperator& r);

// Combined iteration norm sqrt(2) c_r q_norm(Q) + 2 sqrt(pi) c_norm(rho).
double x_norm(const KernelOperator& q, const DensityField& rho, double c_r_value);

// Charge conjugation on kernels: Q'(p, q) = -C conj(Q(-p, -q)) C.
KernelOperator q_conjugate(const KernelOperator& q);

// Binary snapshots (magic "BDFK": lattice spec, mode count, row-major blocks).
void save_kernel(const std::string& path, const KernelOperator& q);
KernelOperator load_kernel(const std::string& path);

}  // namespace bdf
