#include "bdf/lattice.hpp"

#include <cmath>

namespace bdf {

namespace {
// Relative slack when testing |p| <= cutoff, so that modes landing exactly on
// the cutoff sphere are kept despite rounding.
constexpr double kBallSlack = 1e-12;
}  // namespace

std::shared_ptr<const Lattice> Lattice::create(const LatticeSpec& spec) {
  if (spec.points_per_axis <= 0 || spec.points_per_axis % 2 != 0)
    throw ConfigError("lattice: points_per_axis must be a positive even integer");
  if (!(spec.spacing > 0.0)) throw ConfigError("lattice: spacing must be positive");
  if (!(spec.cutoff > 0.0)) throw ConfigError("lattice: cutoff must be positive");
  const int span = spec.points_per_axis / 2;
  if (spec.cutoff > span * spec.spacing * (1.0 + kBallSlack))
    throw ConfigError("lattice: cutoff exceeds the grid half-width points_per_axis/2 * spacing");

  auto lat = std::shared_ptr<Lattice>(new Lattice());
  lat->spec_ = spec;
  lat->dv_ = spec.spacing * spec.spacing * spec.spacing;
  lat->span_ = span;

  const double r2max = spec.cutoff * spec.cutoff * (1.0 + kBallSlack);
  const int side = 2 * span + 1;
  lat->mode_lut_.assign(static_cast<size_t>(side) * side * side, -1);
  for (int ix = -span; ix <= span; ++ix)
    for (int iy = -span; iy <= span; ++iy)
      for (int iz = -span; iz <= span; ++iz) {
        const double r2 = (static_cast<double>(ix) * ix + static_cast<double>(iy) * iy +
                           static_cast<double>(iz) * iz) *
                          spec.spacing * spec.spacing;
        if (r2 > r2max) continue;
        const size_t flat =
            (static_cast<size_t>(ix + span) * side + (iy + span)) * side + (iz + span);
        lat->mode_lut_[flat] = static_cast<int>(lat->modes_.size());
        lat->modes_.emplace_back(ix * spec.spacing, iy * spec.spacing, iz * spec.spacing);
        lat->coords_.push_back({ix, iy, iz});
      }

  const int m = lat->mode_count();
  lat->neg_mode_.resize(m);
  for (int i = 0; i < m; ++i) {
    const auto& c = lat->coords_[i];
    lat->neg_mode_[i] = lat->mode_index(-c[0], -c[1], -c[2]);
  }

  // Difference set: every integer triple in the double-width cube reachable as
  // a difference of two ball modes.  With a ball geometry, d is reachable iff
  // the ball and its translate by d intersect; testing membership directly by
  // scanning modes is cheap and exact.
  const int dside = 4 * span + 1;
  lat->diff_lut_.assign(static_cast<size_t>(dside) * dside * dside, -1);
  std::vector<char> seen(lat->diff_lut_.size(), 0);
  for (int a = 0; a < m; ++a) {
    const auto& ca = lat->coords_[a];
    for (int b = 0; b < m; ++b) {
      const auto& cb = lat->coords_[b];
      const int dx = ca[0] - cb[0], dy = ca[1] - cb[1], dz = ca[2] - cb[2];
      const size_t flat =
          (static_cast<size_t>(dx + 2 * span) * dside + (dy + 2 * span)) * dside + (dz + 2 * span);
      seen[flat] = 1;
    }
  }
  for (int ix = -2 * span; ix <= 2 * span; ++ix)
    for (int iy = -2 * span; iy <= 2 * span; ++iy)
      for (int iz = -2 * span; iz <= 2 * span; ++iz) {
        const size_t flat = (static_cast<size_t>(ix + 2 * span) * dside + (iy + 2 * span)) * dside +
                            (iz + 2 * span);
        if (!seen[flat]) continue;
        lat->diff_lut_[flat] = static_cast<int>(lat->diffs_.size());
        lat->diffs_.emplace_back(ix * spec.spacing, iy * spec.spacing, iz * spec.spacing);
        lat->dcoords_.push_back({ix, iy, iz});
      }

  const int nd = lat->diff_count();
  lat->neg_diff_.resize(nd);
  for (int d = 0; d < nd; ++d) {
    const auto& c = lat->dcoords_[d];
    lat->neg_diff_[d] = lat->diff_index(-c[0], -c[1], -c[2]);
  }
  lat->zero_diff_ = lat->diff_index(0, 0, 0);
  return lat;
}

int Lattice::mode_index(int ix, int iy, int iz) const {
  if (std::abs(ix) > span_ || std::abs(iy) > span_ || std::abs(iz) > span_) return -1;
  const int side = 2 * span_ + 1;
  return mode_lut_[(static_cast<size_t>(ix + span_) * side + (iy + span_)) * side + (iz + span_)];
}

int Lattice::diff_index(int ix, int iy, int iz) const {
  if (std::abs(ix) > 2 * span_ || std::abs(iy) > 2 * span_ || std::abs(iz) > 2 * span_) return -1;
  const int dside = 4 * span_ + 1;
  return diff_lut_[(static_cast<size_t>(ix + 2 * span_) * dside + (iy + 2 * span_)) * dside +
                   (iz + 2 * span_)];
}

int Lattice::diff_of(int a, int b) const {
  const auto& ca = coords_[a];
  const auto& cb = coords_[b];
  return diff_index(ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2]);
}

void Lattice::build_pairs() const {
  pairs_.resize(diffs_.size());
  std::vector<int> count(diffs_.size(), 0);
  const int m = mode_count();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) ++count[diff_of(a, b)];
  for (size_t d = 0; d < pairs_.size(); ++d) pairs_[d].reserve(count[d]);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) pairs_[diff_of(a, b)].emplace_back(a, b);
}

const std::vector<std::pair<int, int>>& Lattice::pairs(int d) const {
  std::call_once(pairs_once_, [this] { build_pairs(); });
  return pairs_[d];
}

void require_same_lattice(const LatticePtr& a, const LatticePtr& b, const char* where) {
  if (a.get() == b.get()) return;
  if (!a || !b || !(a->spec() == b->spec()))
    throw LatticeMismatch(std::string(where) + ": operands live on different lattices");
}

DensityField& DensityField::operator+=(const DensityField& o) {
  require_same_lattice(lat_, o.lat_, "DensityField::+=");
  v_ += o.v_;
  return *this;
}

DensityField& DensityField::operator-=(const DensityField& o) {
  require_same_lattice(lat_, o.lat_, "DensityField::-=");
  v_ -= o.v_;
  return *this;
}

DensityField& DensityField::operator*=(double s) {
  v_ *= s;
  return *this;
}

DensityField DensityField::operator-() const {
  DensityField out(lat_);
  out.v_ = -v_;
  return out;
}

DensityField operator+(DensityField a, const DensityField& b) { return a += b; }
DensityField operator-(DensityField a, const DensityField& b) { return a -= b; }
DensityField operator*(double s, DensityField a) { return a *= s; }

DensityField source_density(const LatticePtr& lat, const SourceSpec& src) {
  if (src.profile != SourceSpec::Profile::gaussian)
    throw ConfigError("source_density: unknown profile");
  if (!(src.sigma > 0.0)) throw ConfigError("source_density: sigma must be positive");
  DensityField n(lat);
  const double norm = src.z * std::pow(2.0 * M_PI, -1.5);
  for (int d = 0; d < lat->diff_count(); ++d)
    n[d] = norm * std::exp(-0.5 * src.sigma * src.sigma * lat->diff(d).squaredNorm());
  return n;
}

double coulomb_product(const DensityField& f, const DensityField& g) {
  require_same_lattice(f.lattice(), g.lattice(), "coulomb_product");
  const auto& lat = *f.lattice();
  cxd acc = 0.0;
  for (int d = 0; d < lat.diff_count(); ++d) {
    if (d == lat.zero_diff()) continue;
    acc += std::conj(f[d]) * g[d] / lat.diff(d).squaredNorm();
  }
  return 4.0 * M_PI * lat.dv() * acc.real();
}

double c_norm(const DensityField& rho) {
  const auto& lat = *rho.lattice();
  double acc = 0.0;
  for (int d = 0; d < lat.diff_count(); ++d) {
    if (d == lat.zero_diff()) continue;
    const double k2 = lat.diff(d).squaredNorm();
    acc += (1.0 + k2) / k2 * std::norm(rho[d]);
  }
  return std::sqrt(lat.dv() * acc);
}

double c_dual_norm(const DensityField& zeta) {
  const auto& lat = *zeta.lattice();
  double acc = 0.0;
  for (int d = 0; d < lat.diff_count(); ++d) {
    const double k2 = lat.diff(d).squaredNorm();
    acc += k2 / (1.0 + k2) * std::norm(zeta[d]);
  }
  return std::sqrt(lat.dv() * acc);
}

double y_norm(const DensityField& phi) {
  const auto& lat = *phi.lattice();
  double acc = 0.0;
  for (int d = 0; d < lat.diff_count(); ++d) {
    const double k2 = lat.diff(d).squaredNorm();
    acc += k2 * (1.0 + k2) * std::norm(phi[d]);
  }
  return std::sqrt(lat.dv() * acc);
}

DensityField coulomb_potential(const DensityField& rho) {
  const auto& lat = *rho.lattice();
  DensityField phi(rho.lattice());
  for (int d = 0; d < lat.diff_count(); ++d) {
    if (d == lat.zero_diff()) continue;
    phi[d] = 4.0 * M_PI * rho[d] / lat.diff(d).squaredNorm();
  }
  return phi;
}

}  // namespace bdf
