// Shared reference implementations for the test suite: deliberately naive
// (triple loops, no gemm, no pair tables) so they fail independently of the
// library's optimised paths.
#pragma once

#include <random>

#include "bdf/kernel.hpp"

namespace oracle {

using namespace bdf;

inline KernelOperator random_kernel(const LatticePtr& lat, std::mt19937_64& rng,
                                    double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  KernelOperator k = KernelOperator::zero(lat);
  const int m = lat->mode_count();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) k.block(a, b)(i, j) = cxd(g(rng), g(rng));
  return k;
}

inline KernelOperator random_hermitian_kernel(const LatticePtr& lat, std::mt19937_64& rng,
                                              double scale = 1.0) {
  KernelOperator k = random_kernel(lat, rng, scale);
  return 0.5 * (k + k.adjoint());
}

// compose by explicit summation: (A B)(a,b) = dv * sum_c A(a,c) B(c,b).
inline KernelOperator naive_compose(const KernelOperator& x, const KernelOperator& y) {
  const LatticePtr& lat = x.lattice();
  KernelOperator out = KernelOperator::zero(lat);
  const int m = lat->mode_count();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Mat4 acc = Mat4::Zero();
      for (int c = 0; c < m; ++c) acc += x.block(a, c) * y.block(c, b);
      out.block(a, b) = lat->dv() * acc;
    }
  return out;
}

// density by scanning every mode pair: rho(k) = dv (2 pi)^{-3/2} sum tr Q(a,b).
inline DensityField naive_density(const KernelOperator& q) {
  const LatticePtr& lat = q.lattice();
  DensityField rho(lat);
  const double scale = lat->dv() * std::pow(2.0 * M_PI, -1.5);
  const int m = lat->mode_count();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      rho[lat->diff_of(a, b)] += scale * q.block(a, b).trace();
  return rho;
}

// exchange kernel by direct double loop:
// R(a,b) = dv/(2 pi^2) sum_{a'} Q(a', b') / |p_a - p_a'|^2 with
// p_{a'} - p_{b'} = p_a - p_b and a' != a.
inline KernelOperator naive_exchange(const KernelOperator& q) {
  const LatticePtr& lat = q.lattice();
  KernelOperator out = KernelOperator::zero(lat);
  const int m = lat->mode_count();
  const double scale = lat->dv() / (2.0 * M_PI * M_PI);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const int d = lat->diff_of(a, b);
      Mat4 acc = Mat4::Zero();
      for (int ap = 0; ap < m; ++ap) {
        if (ap == a) continue;
        const Vec3 delta = lat->mode(a) - lat->mode(ap);
        // b' must land on the lattice: same difference mode
        const auto& ac = lat->mode_coords(ap);
        const auto& dc = lat->diff_coords(d);
        const int bp = lat->mode_index(ac[0] - dc[0], ac[1] - dc[1], ac[2] - dc[2]);
        if (bp < 0) continue;
        acc += q.block(ap, bp) / delta.squaredNorm();
      }
      out.block(a, b) = scale * acc;
    }
  return out;
}

}  // namespace oracle
