#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "bdf/errors.hpp"

namespace bdf {

using cxd = std::complex<double>;
using Vec3 = Eigen::Vector3d;

// Relativistic dispersion E(k) = sqrt(1 + |k|^2)  (units: m = c = hbar = 1).
inline double energy_scale(const Vec3& k) { return std::sqrt(1.0 + k.squaredNorm()); }
inline double energy_scale(double k) { return std::sqrt(1.0 + k * k); }

struct LatticeSpec {
  int points_per_axis = 0;  // even; axis indices run -points_per_axis/2 .. +points_per_axis/2
  double spacing = 0.0;     // momentum step per axis
  double cutoff = 0.0;      // modes kept iff |p| <= cutoff (ties included)

  bool operator==(const LatticeSpec&) const = default;
};

// Cubic momentum grid restricted to the ball |p| <= cutoff.  Modes are ordered
// lexicographically by integer coordinates.  The difference set {p - q} gets the
// same treatment; per-difference pair lists (used by convolutions and densities)
// are built lazily because field-only work never needs them.
class Lattice {
public:
  static std::shared_ptr<const Lattice> create(const LatticeSpec& spec);

  const LatticeSpec& spec() const { return spec_; }
  double dv() const { return dv_; }  // spacing^3, the momentum volume element

  int mode_count() const { return static_cast<int>(modes_.size()); }
  const Vec3& mode(int i) const { return modes_[i]; }
  const std::array<int, 3>& mode_coords(int i) const { return coords_[i]; }
  // Flat index for integer coordinates, or -1 if the triple is outside the ball.
  int mode_index(int ix, int iy, int iz) const;
  // Index of -p; always valid (the ball is symmetric).
  int mode_negation(int i) const { return neg_mode_[i]; }

  int diff_count() const { return static_cast<int>(diffs_.size()); }
  const Vec3& diff(int d) const { return diffs_[d]; }
  const std::array<int, 3>& diff_coords(int d) const { return dcoords_[d]; }
  int diff_index(int ix, int iy, int iz) const;
  int diff_negation(int d) const { return neg_diff_[d]; }
  int zero_diff() const { return zero_diff_; }
  // Index of mode(a) - mode(b) in the difference list.
  int diff_of(int a, int b) const;

  // Ordered mode pairs (a, b) with mode(a) - mode(b) == diff(d).
  const std::vector<std::pair<int, int>>& pairs(int d) const;

private:
  Lattice() = default;
  void build_pairs() const;

  LatticeSpec spec_;
  double dv_ = 0.0;
  int span_ = 0;  // points_per_axis / 2

  std::vector<Vec3> modes_;
  std::vector<std::array<int, 3>> coords_;
  std::vector<int> mode_lut_;  // (2 span + 1)^3 entries, -1 outside the ball
  std::vector<int> neg_mode_;

  std::vector<Vec3> diffs_;
  std::vector<std::array<int, 3>> dcoords_;
  std::vector<int> diff_lut_;  // (4 span + 1)^3 entries
  std::vector<int> neg_diff_;
  int zero_diff_ = -1;

  mutable std::once_flag pairs_once_;
  mutable std::vector<std::vector<std::pair<int, int>>> pairs_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

// Scalar field sampled on the difference set of a lattice (charge densities,
// Coulomb potentials, ...).  Values are Fourier coefficients.
class DensityField {
public:
  explicit DensityField(LatticePtr lat)
      : lat_(std::move(lat)), v_(Eigen::VectorXcd::Zero(lat_->diff_count())) {}

  const LatticePtr& lattice() const { return lat_; }
  int size() const { return static_cast<int>(v_.size()); }
  cxd& operator[](int d) { return v_[d]; }
  const cxd& operator[](int d) const { return v_[d]; }
  Eigen::VectorXcd& values() { return v_; }
  const Eigen::VectorXcd& values() const { return v_; }

  DensityField& operator+=(const DensityField& o);
  DensityField& operator-=(const DensityField& o);
  DensityField& operator*=(double s);
  DensityField operator-() const;

private:
  LatticePtr lat_;
  Eigen::VectorXcd v_;
};

DensityField operator+(DensityField a, const DensityField& b);
DensityField operator-(DensityField a, const DensityField& b);
DensityField operator*(double s, DensityField a);

struct SourceSpec {
  enum class Profile { gaussian };
  Profile profile = Profile::gaussian;
  double z = 1.0;      // total charge
  double sigma = 1.0;  // width

  bool operator==(const SourceSpec&) const = default;
};

// Gaussian charge profile: n(k) = Z (2 pi)^{-3/2} exp(-sigma^2 |k|^2 / 2),
// normalised so the position-space integral equals Z.
DensityField source_density(const LatticePtr& lat, const SourceSpec& src);

// Coulomb pairing D(f, g) = 4 pi dv sum_{k != 0} conj(f) g / |k|^2.  Real part
// (exact for fields obeying the reality condition f(-k) = conj f(k)).
double coulomb_product(const DensityField& f, const DensityField& g);

// Coulomb-space norm: ||rho||^2 = dv sum_{k != 0} E(k)^2 |rho|^2 / |k|^2.
double c_norm(const DensityField& rho);

// Dual norm: ||zeta||^2 = dv sum_k |k|^2 |zeta|^2 / E(k)^2.
double c_dual_norm(const DensityField& zeta);

// Potential-space norm: ||phi||^2 = dv sum_k |k|^2 E(k)^2 |phi|^2.
double y_norm(const DensityField& phi);

// phi(k) = 4 pi rho(k) / |k|^2, zero mode dropped.
DensityField coulomb_potential(const DensityField& rho);

void require_same_lattice(const LatticePtr& a, const LatticePtr& b, const char* where);

}  // namespace bdf
