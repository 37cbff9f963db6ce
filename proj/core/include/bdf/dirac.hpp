#pragma once

#include <Eigen/Dense>
#include <utility>

#include "bdf/lattice.hpp"

namespace bdf {

using Mat4 = Eigen::Matrix4cd;

// Dirac representation: beta = diag(I, -I), alpha_i off-diagonal Pauli blocks.
const Mat4& alpha_matrix(int i);  // i = 0, 1, 2
const Mat4& beta_matrix();

// Free Dirac symbol d(p) = alpha . p + beta; d(p)^2 = E(p)^2 I.
Mat4 d0_block(const Vec3& p);

// Spectral projectors of d(p): L± = (±d(p) + E(p)) / (2 E(p)).
std::pair<Mat4, Mat4> lambda_projectors(const Vec3& p);

// tr[L-(p) L+(q)] = 1 - (p.q + 1) / (E(p) E(q)); the overlap that drives pair
// creation between modes p and q.
double pair_trace(const Vec3& p, const Vec3& q);

// M(p,q) = (E(p)+E(q))^{-1} [ (d(p)/E(p)) (d(q)/E(q)) - I ]; the first-order
// response matrix.  tr M = -4 pair_trace / (E(p)+E(q)).
Mat4 m_matrix(const Vec3& p, const Vec3& q);

// Charge-conjugation matrix C = i beta alpha_2: real, symmetric, C^2 = I, and
// C conj(d(-p)) C = -d(p).
const Mat4& conjugation_matrix();

}  // namespace bdf
