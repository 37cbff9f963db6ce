#include "bdf/dirac.hpp"

namespace bdf {

namespace {

Mat4 make_alpha(int i) {
  Mat4 a = Mat4::Zero();
  Eigen::Matrix2cd s;
  const cxd I(0.0, 1.0);
  switch (i) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, -I, I, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  a.block<2, 2>(0, 2) = s;
  a.block<2, 2>(2, 0) = s;
  return a;
}

Mat4 make_beta() {
  Mat4 b = Mat4::Zero();
  b(0, 0) = b(1, 1) = 1.0;
  b(2, 2) = b(3, 3) = -1.0;
  return b;
}

}  // namespace

const Mat4& alpha_matrix(int i) {
  static const Mat4 a[3] = {make_alpha(0), make_alpha(1), make_alpha(2)};
  return a[i];
}

const Mat4& beta_matrix() {
  static const Mat4 b = make_beta();
  return b;
}

Mat4 d0_block(const Vec3& p) {
  return p.x() * alpha_matrix(0) + p.y() * alpha_matrix(1) + p.z() * alpha_matrix(2) +
         beta_matrix();
}

std::pair<Mat4, Mat4> lambda_projectors(const Vec3& p) {
  const double e = energy_scale(p);
  const Mat4 d = d0_block(p);
  Mat4 plus = (d + e * Mat4::Identity()) / (2.0 * e);
  Mat4 minus = (-d + e * Mat4::Identity()) / (2.0 * e);
  return {plus, minus};
}

double pair_trace(const Vec3& p, const Vec3& q) {
  return 1.0 - (p.dot(q) + 1.0) / (energy_scale(p) * energy_scale(q));
}

Mat4 m_matrix(const Vec3& p, const Vec3& q) {
  const double ep = energy_scale(p), eq = energy_scale(q);
  return ((d0_block(p) / ep) * (d0_block(q) / eq) - Mat4::Identity()) / (ep + eq);
}

const Mat4& conjugation_matrix() {
  static const Mat4 c = cxd(0.0, 1.0) * beta_matrix() * alpha_matrix(1);
  return c;
}

}  // namespace bdf
