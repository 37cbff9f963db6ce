#include "bdf/scf.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "bdf/certificate.hpp"
#include "bdf/response.hpp"

namespace bdf {

SpectralProjection negative_spectral_projector(const KernelOperator& h, double gap_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.op_matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("negative_spectral_projector: eigendecomposition failed");
  const auto& vals = es.eigenvalues();
  SpectralProjection out(h.lattice());
  out.min_abs_eig = vals.cwiseAbs().minCoeff();
  if (out.min_abs_eig < gap_tol) throw GapCollapse(out.min_abs_eig, gap_tol);
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals[i] < 0.0) ++out.negative_count;
  const Eigen::MatrixXcd neg = es.eigenvectors().leftCols(out.negative_count);
  out.projector = KernelOperator::from_op_matrix(h.lattice(), neg * neg.adjoint());
  return out;
}

namespace {

double fit_contraction_rate(const std::vector<IterationRecord>& history) {
  // Least squares on log(increment) vs iteration, skipping the first step
  // (which measures the initial displacement, not the contraction) and the
  // noise floor.
  std::vector<double> xs, ys;
  for (size_t j = 1; j < history.size(); ++j) {
    const double h = history[j].x_increment;
    if (h > 1e-13) {
      xs.push_back(static_cast<double>(j));
      ys.push_back(std::log(h));
    }
  }
  if (xs.size() < 2) {
    if (history.size() >= 2 && history[history.size() - 2].x_increment > 0.0 &&
        history.back().x_increment > 0.0)
      return history.back().x_increment / history[history.size() - 2].x_increment;
    return 0.0;
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

SolverResult run_solver(const SolverConfig& cfg, KernelOperator q, DensityField rho) {
  const LatticePtr lat = q.lattice();
  const DensityField n = source_density(lat, cfg.source);
  const KernelOperator p0 = p0_projector(lat);
  const double cr_v = c_r();

  // Mode-wise mixing weights for the preconditioned scheme; the continuum
  // response enters even when exchange is on.
  Eigen::VectorXd mix;
  if (cfg.scheme == Scheme::preconditioned) {
    mix.resize(lat->diff_count());
    for (int d = 0; d < lat->diff_count(); ++d)
      mix[d] = 1.0 / (1.0 + cfg.alpha * b_lambda_1d(lat->diff(d).norm(), cfg.lattice.cutoff));
  }

  SolverResult res(lat);
  res.q = q;
  res.rho_prime = rho;
  res.status = SolveStatus::max_iter_exceeded;

  double prev_inc = 0.0;
  int growth_streak = 0;
  for (int j = 1; j <= cfg.max_iter; ++j) {
    const KernelOperator d_op = mean_field_operator(res.q, res.rho_prime, cfg.alpha,
                                                    cfg.exchange_enabled);
    const SpectralProjection proj = negative_spectral_projector(d_op, cfg.gap_tol);
    KernelOperator q_next = proj.projector - p0;
    DensityField rho_q = density_of(q_next) - n;
    DensityField rho_next(lat);
    if (cfg.scheme == Scheme::plain) {
      rho_next = std::move(rho_q);
    } else {
      for (int d = 0; d < lat->diff_count(); ++d)
        rho_next[d] = mix[d] * rho_q[d] + (1.0 - mix[d]) * res.rho_prime[d];
    }

    const double inc = x_norm(q_next - res.q, rho_next - res.rho_prime, cr_v);
    const ChargeResult charge = vacuum_charge(q_next);
    IterationRecord rec;
    rec.iter = j;
    rec.x_increment = inc;
    rec.energy = bdf_energy(q_next, n, cfg.alpha, cfg.exchange_enabled);
    rec.charge_str = charge.str;
    rec.charge_cube = charge.cube_trace;
    rec.min_abs_eig = proj.min_abs_eig;
    res.history.push_back(rec);

    res.q = std::move(q_next);
    res.rho_prime = std::move(rho_next);

    if (inc <= cfg.tol) {
      res.status = SolveStatus::converged;
      res.converged = true;
      break;
    }
    if (j > 1 && inc > prev_inc) {
      if (++growth_streak >= 5) {
        res.status = SolveStatus::diverged;
        break;
      }
    } else {
      growth_streak = 0;
    }
    prev_inc = inc;
  }

  res.contraction_rate = fit_contraction_rate(res.history);
  if (res.converged)
    res.verification = verify_solution(cfg, res.q, res.rho_prime);
  return res;
}

}  // namespace

SolverResult solve(const SolverConfig& cfg) {
  const LatticePtr lat = Lattice::create(cfg.lattice);
  KernelOperator q0 = KernelOperator::zero(lat);
  DensityField rho0 = -source_density(lat, cfg.source);
  return run_solver(cfg, std::move(q0), std::move(rho0));
}

SolverResult solve(const SolverConfig& cfg, KernelOperator q0, DensityField rho0) {
  if (!(q0.lattice()->spec() == cfg.lattice))
    throw ConfigError("solve: warm-start state lattice does not match the configuration");
  require_same_lattice(q0.lattice(), rho0.lattice(), "solve");
  return run_solver(cfg, std::move(q0), std::move(rho0));
}

VerificationReport verify_solution(const SolverConfig& cfg, const KernelOperator& q,
                                   const DensityField& rho_prime, int optimality_samples,
                                   std::uint64_t seed) {
  const LatticePtr lat = q.lattice();
  const DensityField n = source_density(lat, cfg.source);
  VerificationReport rep;

  const KernelOperator d_op = mean_field_operator(q, rho_prime, cfg.alpha, cfg.exchange_enabled);
  const KernelOperator p = p0_projector(lat) + q;
  rep.commutator_norm = (compose(p, d_op) - compose(d_op, p)).hs_norm();
  rep.commutator_ok = rep.commutator_norm <= 10.0 * cfg.tol;

  const ChargeResult charge = vacuum_charge(q);
  rep.charge_str = charge.str;
  rep.charge_ok = charge.integer_ok && (q.hs_norm() >= 1.0 || charge.nearest == 0);

  const double shrink =
      cfg.alpha * (2.0 * std::sqrt(M_PI) * c_norm(rho_prime) + std::sqrt(2.0) * c_r() * q_norm(q));
  if (shrink < 1.0) {
    rep.d_value = 1.0 / (1.0 - shrink);
    rep.d_times_alpha_pi4 = cfg.alpha * rep.d_value * M_PI / 4.0;
    rep.d_ok = rep.d_times_alpha_pi4 <= 1.0;
  } else {
    rep.d_value = 1e300;
    rep.d_times_alpha_pi4 = 1e300;
    rep.d_ok = false;
  }

  // Energy stationarity: rotate one occupied direction towards an unoccupied
  // one (rank-two change keeps P0 + Q a projector) and expand the energy.
  rep.optimality_samples = optimality_samples;
  if (optimality_samples > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g01(0.0, 1.0);
    const Eigen::MatrixXcd p_op = p.op_matrix();
    const int dim = static_cast<int>(p_op.rows());
    double worst = 1e300;
    const double theta = 1e-3;
    for (int s = 0; s < optimality_samples; ++s) {
      Eigen::VectorXcd g1(dim), g2(dim);
      for (int i = 0; i < dim; ++i) {
        g1[i] = cxd(g01(rng), g01(rng));
        g2[i] = cxd(g01(rng), g01(rng));
      }
      Eigen::VectorXcd u = p_op * g1;
      Eigen::VectorXcd w = g2 - p_op * g2;
      if (u.norm() < 1e-12 || w.norm() < 1e-12) continue;
      u.normalize();
      w.normalize();
      const Eigen::VectorXcd v = std::cos(theta) * u + std::sin(theta) * w;
      const Eigen::MatrixXcd gamma_op = v * v.adjoint() - u * u.adjoint();
      const KernelOperator gamma = KernelOperator::from_op_matrix(lat, gamma_op);
      const DensityField rho_g = density_of(gamma);
      double de = frobenius_inner(d_op, gamma).real() +
                  0.5 * cfg.alpha * coulomb_product(rho_g, rho_g);
      if (cfg.exchange_enabled)
        de -= 0.5 * cfg.alpha * frobenius_inner(gamma, exchange_kernel(gamma)).real();
      worst = std::min(worst, de);
    }
    rep.worst_delta_e = worst;
    rep.optimality_ok = worst >= -10.0 * cfg.tol;
  } else {
    rep.optimality_ok = true;
  }

  rep.all_ok = rep.commutator_ok && rep.charge_ok && rep.d_ok && rep.optimality_ok;
  return rep;
}

namespace {

constexpr char kStateMagic[4] = {'B', 'D', 'F', 'S'};
constexpr std::uint32_t kStateVersion = 1;

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

void save_state(const std::string& path, const KernelOperator& q, const DensityField& rho_prime) {
  require_same_lattice(q.lattice(), rho_prime.lattice(), "save_state");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw SnapshotError("save_state: cannot open " + path);
  os.write(kStateMagic, 4);
  put(os, kStateVersion);
  const auto& spec = q.lattice()->spec();
  put(os, static_cast<std::int32_t>(spec.points_per_axis));
  put(os, spec.spacing);
  put(os, spec.cutoff);
  put(os, static_cast<std::uint64_t>(q.mode_count()));
  put(os, static_cast<std::uint64_t>(rho_prime.size()));
  const auto& raw = q.raw();
  for (Eigen::Index r = 0; r < raw.rows(); ++r)
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
      put(os, raw(r, c).real());
      put(os, raw(r, c).imag());
    }
  for (int d = 0; d < rho_prime.size(); ++d) {
    put(os, rho_prime[d].real());
    put(os, rho_prime[d].imag());
  }
  if (!os) throw SnapshotError("save_state: write failed for " + path);
}

std::pair<KernelOperator, DensityField> load_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("load_state: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kStateMagic, 4) != 0)
    throw SnapshotError("load_state: bad magic in " + path);
  if (get<std::uint32_t>(is) != kStateVersion)
    throw SnapshotError("load_state: unsupported version in " + path);
  LatticeSpec spec;
  spec.points_per_axis = get<std::int32_t>(is);
  spec.spacing = get<double>(is);
  spec.cutoff = get<double>(is);
  auto lat = Lattice::create(spec);
  const auto modes = get<std::uint64_t>(is);
  const auto diffs = get<std::uint64_t>(is);
  if (modes != static_cast<std::uint64_t>(lat->mode_count()) ||
      diffs != static_cast<std::uint64_t>(lat->diff_count()))
    throw SnapshotError("load_state: stored sizes do not match the lattice spec");
  KernelOperator q(lat);
  auto& raw = q.raw();
  for (Eigen::Index r = 0; r < raw.rows(); ++r)
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      raw(r, c) = cxd(re, im);
    }
  DensityField rho(lat);
  for (int d = 0; d < rho.size(); ++d) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    rho[d] = cxd(re, im);
  }
  if (!is) throw SnapshotError("load_state: truncated data in " + path);
  return {std::move(q), std::move(rho)};
}

}  // namespace bdf
