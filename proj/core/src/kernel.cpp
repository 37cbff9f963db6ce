#include "bdf/kernel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace bdf {

KernelOperator::KernelOperator(LatticePtr lat) : lat_(std::move(lat)) {
  raw_ = Eigen::MatrixXcd::Zero(4 * lat_->mode_count(), 4 * lat_->mode_count());
}

KernelOperator KernelOperator::identity(const LatticePtr& lat) {
  KernelOperator a(lat);
  a.raw_ = Eigen::MatrixXcd::Identity(a.dim(), a.dim()) / lat->dv();
  return a;
}

KernelOperator KernelOperator::from_op_matrix(const LatticePtr& lat, const Eigen::MatrixXcd& m) {
  if (m.rows() != 4 * lat->mode_count() || m.cols() != 4 * lat->mode_count())
    throw ConfigError("from_op_matrix: matrix dimension does not match the lattice");
  KernelOperator a(lat);
  a.raw_ = m / lat->dv();
  return a;
}

KernelOperator& KernelOperator::operator+=(const KernelOperator& o) {
  require_same_lattice(lat_, o.lat_, "KernelOperator::+=");
  raw_ += o.raw_;
  return *this;
}

KernelOperator& KernelOperator::operator-=(const KernelOperator& o) {
  require_same_lattice(lat_, o.lat_, "KernelOperator::-=");
  raw_ -= o.raw_;
  return *this;
}

KernelOperator& KernelOperator::operator*=(double s) {
  raw_ *= s;
  return *this;
}

KernelOperator& KernelOperator::operator*=(cxd s) {
  raw_ *= s;
  return *this;
}

KernelOperator KernelOperator::operator-() const {
  KernelOperator out(lat_);
  out.raw_ = -raw_;
  return out;
}

KernelOperator KernelOperator::adjoint() const {
  KernelOperator out(lat_);
  out.raw_ = raw_.adjoint();
  return out;
}

cxd KernelOperator::trace() const { return lat_->dv() * raw_.trace(); }

KernelOperator operator+(KernelOperator a, const KernelOperator& b) { return a += b; }
KernelOperator operator-(KernelOperator a, const KernelOperator& b) { return a -= b; }
KernelOperator operator*(double s, KernelOperator a) { return a *= s; }
KernelOperator operator*(cxd s, KernelOperator a) { return a *= s; }

KernelOperator compose(const KernelOperator& a, const KernelOperator& b) {
  require_same_lattice(a.lattice(), b.lattice(), "compose");
  KernelOperator out(a.lattice());
  out.raw().noalias() = a.lattice()->dv() * (a.raw() * b.raw());
  return out;
}

cxd frobenius_inner(const KernelOperator& a, const KernelOperator& b) {
  require_same_lattice(a.lattice(), b.lattice(), "frobenius_inner");
  const double dv = a.lattice()->dv();
  return dv * dv * a.raw().conjugate().cwiseProduct(b.raw()).sum();
}

KernelOperator free_dirac(const LatticePtr& lat) {
  KernelOperator d(lat);
  const double inv_dv = 1.0 / lat->dv();
  for (int p = 0; p < lat->mode_count(); ++p) d.block(p, p) = inv_dv * d0_block(lat->mode(p));
  return d;
}

KernelOperator p0_projector(const LatticePtr& lat) {
  KernelOperator p(lat);
  const double inv_dv = 1.0 / lat->dv();
  for (int i = 0; i < lat->mode_count(); ++i)
    p.block(i, i) = inv_dv * lambda_projectors(lat->mode(i)).second;
  return p;
}

double p0_trace(const KernelOperator& a) {
  const auto& lat = *a.lattice();
  cxd acc = 0.0;
  for (int p = 0; p < lat.mode_count(); ++p) {
    auto [plus, minus] = lambda_projectors(lat.mode(p));
    const Mat4 blk = a.block(p, p);
    acc += (plus * blk * plus).trace() + (minus * blk * minus).trace();
  }
  return (lat.dv() * acc).real();
}

double projector_split_trace(const KernelOperator& a, const KernelOperator& proj) {
  const KernelOperator comp = KernelOperator::identity(a.lattice()) - proj;
  const double upper = compose(proj, compose(a, proj)).trace().real();
  const double lower = compose(comp, compose(a, comp)).trace().real();
  return upper + lower;
}

ChargeResult vacuum_charge(const KernelOperator& q, double tol) {
  ChargeResult out;
  out.str = p0_trace(q);
  const Eigen::MatrixXcd op = q.op_matrix();
  Eigen::MatrixXcd sq;
  sq.noalias() = op * op;
  out.cube_trace = (sq.cwiseProduct(op.transpose())).sum().real();  // tr(op^3)
  out.plain_trace = q.trace().real();
  out.nearest = std::lround(out.str);
  out.integer_ok = std::abs(out.str - static_cast<double>(out.nearest)) <= tol;
  return out;
}

DensityField density_of(const KernelOperator& g) {
  const auto& latp = g.lattice();
  const auto& lat = *latp;
  DensityField rho(latp);
  const double scale = lat.dv() * std::pow(2.0 * M_PI, -1.5);
  for (int d = 0; d < lat.diff_count(); ++d) {
    cxd acc = 0.0;
    for (const auto& [a, b] : lat.pairs(d)) acc += g.block(a, b).trace();
    rho[d] = scale * acc;
  }
  return rho;
}

KernelOperator exchange_kernel(const KernelOperator& q) {
  const auto& latp = q.lattice();
  const auto& lat = *latp;
  KernelOperator r(latp);
  const double scale = lat.dv() / (2.0 * M_PI * M_PI);
  const double inv_sp2 = 1.0 / (lat.spec().spacing * lat.spec().spacing);

  // Per difference d the map is a dense matrix over the pair list: rows and
  // columns are indexed by the left mode a (one pair per a), with Coulomb
  // weights 1/|p_a - p_a'|^2.  Flattening the 4x4 blocks into rows turns the
  // convolution into one real x complex gemm per difference.
  Eigen::MatrixXd w, gr, gi, rr, ri;
  for (int d = 0; d < lat.diff_count(); ++d) {
    const auto& prs = lat.pairs(d);
    const int n = static_cast<int>(prs.size());
    if (n == 0) continue;
    w.resize(n, n);
    for (int s = 0; s < n; ++s) {
      const auto& cs = lat.mode_coords(prs[s].first);
      for (int t = 0; t < n; ++t) {
        if (s == t) {
          w(t, s) = 0.0;
          continue;
        }
        const auto& ct = lat.mode_coords(prs[t].first);
        const double l2 = static_cast<double>(ct[0] - cs[0]) * (ct[0] - cs[0]) +
                          static_cast<double>(ct[1] - cs[1]) * (ct[1] - cs[1]) +
                          static_cast<double>(ct[2] - cs[2]) * (ct[2] - cs[2]);
        w(t, s) = inv_sp2 / l2;
      }
    }
    gr.resize(n, 16);
    gi.resize(n, 16);
    for (int s = 0; s < n; ++s) {
      const Mat4 blk = q.block(prs[s].first, prs[s].second);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          gr(s, 4 * i + j) = blk(i, j).real();
          gi(s, 4 * i + j) = blk(i, j).imag();
        }
    }
    rr.noalias() = w * gr;
    ri.noalias() = w * gi;
    for (int t = 0; t < n; ++t) {
      auto blk = r.block(prs[t].first, prs[t].second);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          blk(i, j) = scale * cxd(rr(t, 4 * i + j), ri(t, 4 * i + j));
    }
  }
  return r;
}

KernelOperator coulomb_multiplier(const DensityField& rho) {
  const auto& latp = rho.lattice();
  const auto& lat = *latp;
  KernelOperator v(latp);
  const double scale = 4.0 * M_PI * std::pow(2.0 * M_PI, -1.5);
  for (int d = 0; d < lat.diff_count(); ++d) {
    if (d == lat.zero_diff()) continue;
    const cxd val = scale * rho[d] / lat.diff(d).squaredNorm();
    for (const auto& [a, b] : lat.pairs(d)) {
      auto blk = v.block(a, b);
      blk(0, 0) = blk(1, 1) = blk(2, 2) = blk(3, 3) = val;
    }
  }
  return v;
}

namespace {

double weighted_kernel_norm(const KernelOperator& q, bool sum_energy_up) {
  const auto& lat = *q.lattice();
  const int m = lat.mode_count();
  double acc = 0.0;
  for (int a = 0; a < m; ++a) {
    const Vec3& pa = lat.mode(a);
    for (int b = 0; b < m; ++b) {
      const Vec3& pb = lat.mode(b);
      const double ediff = 1.0 + (pa - pb).squaredNorm();       // E(p-q)^2
      const double esum = energy_scale(Vec3(pa + pb));          // E(p+q)
      const double wgt = sum_energy_up ? ediff * esum : ediff / esum;
      acc += wgt * q.block(a, b).squaredNorm();
    }
  }
  return lat.dv() * std::sqrt(acc);
}

}  // namespace

double q_norm(const KernelOperator& q) { return weighted_kernel_norm(q, true); }
double r_norm(const KernelOperator& r) { return weighted_kernel_norm(r, false); }

double x_norm(const KernelOperator& q, const DensityField& rho, double c_r_value) {
  return c_r_value * std::sqrt(2.0) * q_norm(q) + 2.0 * std::sqrt(M_PI) * c_norm(rho);
}

KernelOperator q_conjugate(const KernelOperator& q) {
  const auto& lat = *q.lattice();
  KernelOperator out(q.lattice());
  const Mat4& c = conjugation_matrix();
  for (int a = 0; a < lat.mode_count(); ++a)
    for (int b = 0; b < lat.mode_count(); ++b)
      out.block(a, b) =
          -c * q.block(lat.mode_negation(a), lat.mode_negation(b)).conjugate() * c;
  return out;
}

namespace {

constexpr char kKernelMagic[4] = {'B', 'D', 'F', 'K'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_kernel(const std::string& path, const KernelOperator& q) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw SnapshotError("save_kernel: cannot open " + path);
  os.write(kKernelMagic, 4);
  put(os, kSnapshotVersion);
  const auto& spec = q.lattice()->spec();
  put(os, static_cast<std::int32_t>(spec.points_per_axis));
  put(os, spec.spacing);
  put(os, spec.cutoff);
  put(os, static_cast<std::uint64_t>(q.mode_count()));
  const auto& raw = q.raw();
  for (Eigen::Index r = 0; r < raw.rows(); ++r)
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
      put(os, raw(r, c).real());
      put(os, raw(r, c).imag());
    }
  if (!os) throw SnapshotError("save_kernel: write failed for " + path);
}

KernelOperator load_kernel(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("load_kernel: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kKernelMagic, 4) != 0)
    throw SnapshotError("load_kernel: bad magic in " + path);
  if (get<std::uint32_t>(is) != kSnapshotVersion)
    throw SnapshotError("load_kernel: unsupported version in " + path);
  LatticeSpec spec;
  spec.points_per_axis = get<std::int32_t>(is);
  spec.spacing = get<double>(is);
  spec.cutoff = get<double>(is);
  auto lat = Lattice::create(spec);
  const auto modes = get<std::uint64_t>(is);
  if (modes != static_cast<std::uint64_t>(lat->mode_count()))
    throw SnapshotError("load_kernel: mode count does not match the stored lattice spec");
  KernelOperator q(lat);
  auto& raw = q.raw();
  for (Eigen::Index r = 0; r < raw.rows(); ++r)
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      raw(r, c) = cxd(re, im);
    }
  if (!is) throw SnapshotError("load_kernel: truncated data in " + path);
  return q;
}

}  // namespace bdf
